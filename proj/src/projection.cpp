#include "scapegeom/projection.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "scapegeom/parallel.hpp"

namespace scapegeom::projection {

namespace {

constexpr size_t kParallelThreshold = 1u << 15;
constexpr std::int64_t kNoPoint = -1;

struct ZBuffer {
  std::vector<double> z;
  std::vector<std::int64_t> index;

  explicit ZBuffer(size_t pixels)
      : z(pixels, std::numeric_limits<double>::infinity()), index(pixels, kNoPoint) {}

  void offer(size_t pixel, double depth, std::int64_t idx) {
    const std::int64_t cur = index[pixel];
    if (cur == kNoPoint || depth < z[pixel] || (depth == z[pixel] && idx < cur)) {
      z[pixel] = depth;
      index[pixel] = idx;
    }
  }
};

void splat_range(const PointCloud& cloud, const Camera& camera, const RenderOptions& opt, size_t begin,
                 size_t end, ZBuffer& zb) {
  const CameraIntrinsics& k = camera.intrinsics;
  const int r = opt.splat_radius;
  for (size_t i = begin; i < end; ++i) {
    const Vec3 pc = world_to_camera(camera.pose, cloud.positions[i]);
    const auto px = project(k, pc, opt.z_near);
    if (!px) continue;
    if (!(std::abs(px->u) < 1e9 && std::abs(px->v) < 1e9)) continue;
    const long long u0 = round_half_up(px->u);
    const long long v0 = round_half_up(px->v);
    for (long long v = v0 - r; v <= v0 + r; ++v) {
      if (v < 0 || v >= k.height) continue;
      for (long long u = u0 - r; u <= u0 + r; ++u) {
        if (u < 0 || u >= k.width) continue;
        zb.offer(size_t(v) * size_t(k.width) + size_t(u), pc.z(), static_cast<std::int64_t>(i));
      }
    }
  }
}

}  // namespace

Vec3 world_to_camera(const Pose& pose, const Vec3& world) {
  const Mat3& R = pose.rotation;
  const double dx = world.x() - pose.translation.x();
  const double dy = world.y() - pose.translation.y();
  const double dz = world.z() - pose.translation.z();
  return {R(0, 0) * dx + R(1, 0) * dy + R(2, 0) * dz,
          R(0, 1) * dx + R(1, 1) * dy + R(2, 1) * dz,
          R(0, 2) * dx + R(1, 2) * dy + R(2, 2) * dz};
}

Vec3 camera_to_world(const Pose& pose, const Vec3& cam) {
  const Mat3& R = pose.rotation;
  const Vec3& t = pose.translation;
  return {R(0, 0) * cam.x() + R(0, 1) * cam.y() + R(0, 2) * cam.z() + t.x(),
          R(1, 0) * cam.x() + R(1, 1) * cam.y() + R(1, 2) * cam.z() + t.y(),
          R(2, 0) * cam.x() + R(2, 1) * cam.y() + R(2, 2) * cam.z() + t.z()};
}

std::optional<PixelCoord> project(const CameraIntrinsics& k, const Vec3& cam, double z_near) {
  if (!(cam.z() > z_near)) return std::nullopt;
  return PixelCoord{k.fx * cam.x() / cam.z() + k.cx, k.fy * cam.y() / cam.z() + k.cy};
}

long long round_half_up(double x) { return static_cast<long long>(std::floor(x + 0.5)); }

PointCloud back_project(const RgbdImage& image, const Camera& camera, int source_index) {
  check_dims(image, camera.intrinsics).throw_if_error();
  validate(camera).throw_if_error();
  const CameraIntrinsics& k = camera.intrinsics;
  PointCloud cloud;
  for (int v = 0; v < image.height; ++v) {
    for (int u = 0; u < image.width; ++u) {
      const size_t i = image.index(u, v);
      const double d = image.depth[i];
      if (!(d > 0.0)) continue;
      const Vec3 pc((u - k.cx) / k.fx * d, (v - k.cy) / k.fy * d, d);
      cloud.push_back(camera_to_world(camera.pose, pc), Vec3(image.r(i, 0), image.r(i, 1), image.r(i, 2)),
                      source_index);
    }
  }
  return cloud;
}

RenderBundle render_points(const PointCloud& cloud, const Camera& camera, const RenderOptions& options) {
  validate(camera).throw_if_error();
  if (options.splat_radius < 0) throw Error(ErrorKind::kOutOfRangeValue, "splat radius must be >= 0");
  const CameraIntrinsics& k = camera.intrinsics;
  const size_t pixels = size_t(k.width) * size_t(k.height);
  const size_t n = cloud.size();

  ZBuffer zb(pixels);
  const unsigned workers = n >= kParallelThreshold ? thread_count() : 1u;
  if (workers <= 1) {
    splat_range(cloud, camera, options, 0, n, zb);
  } else {
    // Tile-local buffers merged with the same (depth, index) ordering as the serial path.
    std::vector<ZBuffer> local(workers, ZBuffer(pixels));
    parallel_chunks(
        n, [&](size_t b, size_t e, unsigned w) { splat_range(cloud, camera, options, b, e, local[w]); }, workers);
    for (const ZBuffer& l : local)
      for (size_t p = 0; p < pixels; ++p)
        if (l.index[p] != kNoPoint) zb.offer(p, l.z[p], l.index[p]);
  }

  RenderBundle out{RgbdImage(k.width, k.height), VisibilityMask(k.width, k.height)};
  for (size_t p = 0; p < pixels; ++p) {
    const std::int64_t idx = zb.index[p];
    if (idx == kNoPoint) continue;
    const Vec3& c = cloud.colors[size_t(idx)];
    out.image.rgb[p * 3 + 0] = c.x();
    out.image.rgb[p * 3 + 1] = c.y();
    out.image.rgb[p * 3 + 2] = c.z();
    out.image.depth[p] = zb.z[p];
    out.mask.mask[p] = 1;
  }
  return out;
}

PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose) {
  PointCloud out = cloud;
  for (Vec3& p : out.positions) p = camera_to_world(pose, p);
  return out;
}

void append_cloud(PointCloud& into, const PointCloud& from) {
  into.positions.insert(into.positions.end(), from.positions.begin(), from.positions.end());
  into.colors.insert(into.colors.end(), from.colors.begin(), from.colors.end());
  into.source_index.insert(into.source_index.end(), from.source_index.begin(), from.source_index.end());
}

PointCloud merge_clouds(std::span<const PointCloud> clouds) {
  PointCloud out;
  size_t total = 0;
  for (const auto& c : clouds) total += c.size();
  out.positions.reserve(total);
  out.colors.reserve(total);
  out.source_index.reserve(total);
  for (const auto& c : clouds) append_cloud(out, c);
  return out;
}

}  // namespace scapegeom::projection
