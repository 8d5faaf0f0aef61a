#include "scapegeom/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "scapegeom/projection.hpp"

namespace scapegeom::conditioning {

using projection::kZNear;

Vec3 ColorImage::at(int u, int v) const {
  const size_t i = (size_t(v) * size_t(width) + size_t(u)) * 3;
  return {rgb[i], rgb[i + 1], rgb[i + 2]};
}

void ColorImage::set(int u, int v, const Vec3& c) {
  const size_t i = (size_t(v) * size_t(width) + size_t(u)) * 3;
  rgb[i] = c.x();
  rgb[i + 1] = c.y();
  rgb[i + 2] = c.z();
}

Status validate(const MapPolyline& line) {
  if (line.points.size() < 2) return Status::Fail(ErrorKind::kDimensionMismatch, "polyline needs >= 2 points");
  for (const auto& p : line.points)
    if (!p.allFinite()) return Status::Fail(ErrorKind::kOutOfRangeValue, "polyline point not finite");
  return Status::Ok();
}

Status validate(const ObjectBox& box) {
  if (!(box.size.minCoeff() > 0.0)) return Status::Fail(ErrorKind::kOutOfRangeValue, "box sizes must be > 0");
  if (!box.center.allFinite() || !std::isfinite(box.yaw))
    return Status::Fail(ErrorKind::kOutOfRangeValue, "box pose not finite");
  return Status::Ok();
}

std::string_view to_string(MapLayer layer) {
  switch (layer) {
    case MapLayer::kLaneBoundary: return "lane_boundary";
    case MapLayer::kLaneDivider: return "lane_divider";
    case MapLayer::kPedestrianCrossing: return "pedestrian_crossing";
  }
  return "lane_boundary";
}

std::string_view to_string(ObjectCategory category) {
  switch (category) {
    case ObjectCategory::kVehicle: return "vehicle";
    case ObjectCategory::kPedestrian: return "pedestrian";
    case ObjectCategory::kRoadblock: return "roadblock";
    case ObjectCategory::kOther: return "other";
  }
  return "other";
}

MapLayer parse_layer(std::string_view name) {
  for (MapLayer l : {MapLayer::kLaneBoundary, MapLayer::kLaneDivider, MapLayer::kPedestrianCrossing})
    if (to_string(l) == name) return l;
  throw Error(ErrorKind::kOutOfRangeValue, "unknown map layer '" + std::string(name) + "'");
}

ObjectCategory parse_category(std::string_view name) {
  for (ObjectCategory c : {ObjectCategory::kVehicle, ObjectCategory::kPedestrian, ObjectCategory::kRoadblock,
                           ObjectCategory::kOther})
    if (to_string(c) == name) return c;
  throw Error(ErrorKind::kOutOfRangeValue, "unknown object category '" + std::string(name) + "'");
}

Vec3 layer_color(MapLayer layer) {
  switch (layer) {
    case MapLayer::kLaneBoundary: return {1.0, 0.0, 0.0};
    case MapLayer::kLaneDivider: return {0.0, 1.0, 0.0};
    case MapLayer::kPedestrianCrossing: return {0.0, 0.0, 1.0};
  }
  return {1.0, 1.0, 1.0};
}

Vec3 category_color(ObjectCategory category) {
  switch (category) {
    case ObjectCategory::kVehicle: return {0.0, 0.6, 1.0};
    case ObjectCategory::kPedestrian: return {1.0, 0.2, 0.6};
    case ObjectCategory::kRoadblock: return {1.0, 0.8, 0.0};
    case ObjectCategory::kOther: return {0.6, 0.6, 0.6};
  }
  return {1.0, 1.0, 1.0};
}

const std::array<Vec3, 12>& orientation_palette() {
  // All components are multiples of 1/255 via {0, 0.6, 1} so PNG output is exact.
  static const std::array<Vec3, 12> palette{{
      {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {1.0, 1.0, 0.0},
      {1.0, 0.0, 1.0}, {0.0, 1.0, 1.0}, {1.0, 0.6, 0.0}, {0.6, 0.0, 1.0},
      {0.6, 1.0, 0.0}, {0.0, 0.6, 1.0}, {1.0, 0.6, 0.6}, {0.6, 0.6, 1.0},
  }};
  return palette;
}

std::array<Vec3, 8> box_corners(const ObjectBox& box) {
  const double hl = box.size.x() / 2.0;  // along heading (+z at yaw 0)
  const double hw = box.size.y() / 2.0;  // lateral (+x is right)
  const double hh = box.size.z() / 2.0;  // vertical (+y is down)
  // Box frame: front = +z, left = -x, bottom = +y.
  const std::array<Vec3, 8> local{{
      {-hw, hh, hl}, {hw, hh, hl}, {hw, hh, -hl}, {-hw, hh, -hl},
      {-hw, -hh, hl}, {hw, -hh, hl}, {hw, -hh, -hl}, {-hw, -hh, -hl},
  }};
  const Mat3 r = yaw_rotation(box.yaw);
  std::array<Vec3, 8> out;
  for (size_t i = 0; i < 8; ++i) out[i] = r * local[i] + box.center;
  return out;
}

std::vector<std::pair<int, int>> line_pixels(double u0, double v0, double u1, double v1) {
  std::vector<std::pair<int, int>> out;
  const double du = u1 - u0;
  const double dv = v1 - v0;
  const bool x_major = std::abs(du) >= std::abs(dv);
  const double a0 = x_major ? u0 : v0;
  const double a1 = x_major ? u1 : v1;
  const long long s = projection::round_half_up(std::min(a0, a1));
  const long long e = projection::round_half_up(std::max(a0, a1));
  const double span = a1 - a0;
  for (long long a = s; a <= e; ++a) {
    // Parameter of the integer major-axis position, clamped onto the segment.
    double f = span == 0.0 ? 0.0 : (static_cast<double>(a) - a0) / span;
    f = std::clamp(f, 0.0, 1.0);
    const double minor = x_major ? v0 + f * dv : u0 + f * du;
    const long long m = projection::round_half_up(minor);
    if (x_major)
      out.emplace_back(static_cast<int>(a), static_cast<int>(m));
    else
      out.emplace_back(static_cast<int>(m), static_cast<int>(a));
  }
  return out;
}

namespace {

// Liang-Barsky clip of the parametric segment p0 + f (p1 - p0) against [lo, hi] on one axis.
bool clip_axis(double p0, double d, double lo, double hi, double& f0, double& f1) {
  if (d == 0.0) return p0 >= lo && p0 <= hi;
  double a = (lo - p0) / d;
  double b = (hi - p0) / d;
  if (a > b) std::swap(a, b);
  f0 = std::max(f0, a);
  f1 = std::min(f1, b);
  return f0 <= f1;
}

}  // namespace

void draw_segment(ColorImage& image, const Camera& camera, const Vec3& a, const Vec3& b, const Vec3& color) {
  Vec3 ca = projection::world_to_camera(camera.pose, a);
  Vec3 cb = projection::world_to_camera(camera.pose, b);
  if (ca.z() <= kZNear && cb.z() <= kZNear) return;
  if (ca.z() < kZNear || cb.z() < kZNear) {
    const double f = (kZNear - ca.z()) / (cb.z() - ca.z());
    const Vec3 cut = ca + f * (cb - ca);
    (ca.z() < kZNear ? ca : cb) = Vec3(cut.x(), cut.y(), kZNear);
  }
  const CameraIntrinsics& k = camera.intrinsics;
  double u0 = k.fx * ca.x() / ca.z() + k.cx, v0 = k.fy * ca.y() / ca.z() + k.cy;
  double u1 = k.fx * cb.x() / cb.z() + k.cx, v1 = k.fy * cb.y() / cb.z() + k.cy;

  // Clip in image space so near-plane projections do not produce huge loops.
  double f0 = 0.0, f1 = 1.0;
  const double du = u1 - u0, dv = v1 - v0;
  if (!clip_axis(u0, du, -1.0, k.width, f0, f1) || !clip_axis(v0, dv, -1.0, k.height, f0, f1)) return;
  const double cu0 = u0 + f0 * du, cv0 = v0 + f0 * dv;
  const double cu1 = u0 + f1 * du, cv1 = v0 + f1 * dv;
  for (const auto& [u, v] : line_pixels(cu0, cv0, cu1, cv1))
    if (u >= 0 && u < image.width && v >= 0 && v < image.height) image.set(u, v, color);
}

ColorImage rasterize_map(std::span<const MapPolyline> polylines, const Camera& camera) {
  validate(camera).throw_if_error();
  ColorImage image(camera.intrinsics.width, camera.intrinsics.height);
  for (const MapPolyline& line : polylines) {
    validate(line).throw_if_error();
    const Vec3 color = layer_color(line.layer);
    for (size_t i = 0; i + 1 < line.points.size(); ++i)
      draw_segment(image, camera, line.points[i], line.points[i + 1], color);
  }
  return image;
}

namespace {

std::vector<size_t> far_to_near(std::span<const ObjectBox> boxes, const Camera& camera) {
  std::vector<double> depth(boxes.size());
  for (size_t i = 0; i < boxes.size(); ++i) {
    validate(boxes[i]).throw_if_error();
    depth[i] = projection::world_to_camera(camera.pose, boxes[i].center).z();
  }
  std::vector<size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return depth[a] > depth[b]; });
  return order;
}

template <typename EdgeColor>
ColorImage rasterize_boxes(std::span<const ObjectBox> boxes, const Camera& camera, EdgeColor edge_color) {
  validate(camera).throw_if_error();
  ColorImage image(camera.intrinsics.width, camera.intrinsics.height);
  for (size_t b : far_to_near(boxes, camera)) {
    const auto corners = box_corners(boxes[b]);
    for (size_t e = 0; e < kBoxEdges.size(); ++e) {
      const auto [i, j] = kBoxEdges[e];
      draw_segment(image, camera, corners[size_t(i)], corners[size_t(j)], edge_color(boxes[b], e));
    }
  }
  return image;
}

}  // namespace

ColorImage rasterize_boxes_semantic(std::span<const ObjectBox> boxes, const Camera& camera) {
  return rasterize_boxes(boxes, camera, [](const ObjectBox& box, size_t) { return category_color(box.category); });
}

ColorImage rasterize_boxes_orientation(std::span<const ObjectBox> boxes, const Camera& camera) {
  return rasterize_boxes(boxes, camera, [](const ObjectBox&, size_t edge) { return orientation_palette()[edge]; });
}

ControlImages rasterize_controls(const SceneControls& controls, const Camera& camera) {
  return {rasterize_map(controls.polylines, camera), rasterize_boxes_semantic(controls.boxes, camera),
          rasterize_boxes_orientation(controls.boxes, camera)};
}

VisibilityMask downsample_mask(const VisibilityMask& mask, int factor) {
  validate(mask).throw_if_error();
  if (factor < 1 || mask.width % factor != 0 || mask.height % factor != 0)
    throw Error(ErrorKind::kNonDivisibleFactor, "factor " + std::to_string(factor) + " does not divide " +
                                                    std::to_string(mask.width) + "x" + std::to_string(mask.height));
  VisibilityMask out(mask.width / factor, mask.height / factor);
  const int block = factor * factor;
  for (int by = 0; by < out.height; ++by)
    for (int bx = 0; bx < out.width; ++bx) {
      int ones = 0;
      for (int y = by * factor; y < (by + 1) * factor; ++y)
        for (int x = bx * factor; x < (bx + 1) * factor; ++x) ones += mask.mask[size_t(y) * mask.width + x];
      out.mask[size_t(by) * out.width + bx] = (2 * ones >= block) ? 1 : 0;
    }
  return out;
}

}  // namespace scapegeom::conditioning
