#include "scapegeom/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace scapegeom::synthetic {

namespace {

double quantize(double c) { return std::round(std::clamp(c, 0.0, 1.0) * 255.0) / 255.0; }

}  // namespace

RgbdImage render_corridor(const Corridor& corridor, const Camera& camera) {
  validate(camera).throw_if_error();
  const CameraIntrinsics& k = camera.intrinsics;
  const Mat3& R = camera.pose.rotation;
  const Vec3& o = camera.pose.translation;
  RgbdImage img(k.width, k.height);
  for (int v = 0; v < k.height; ++v) {
    for (int u = 0; u < k.width; ++u) {
      const Vec3 ray_cam((u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0);
      const Vec3 dir = R * ray_cam;
      // Exit distance along the ray (in units of camera z) through each bounding plane.
      double best = std::numeric_limits<double>::infinity();
      int surface = -1;
      auto consider = [&](double origin, double d, double plane, int id) {
        if (d == 0.0) return;
        const double s = (plane - origin) / d;
        if (s > 0.0 && s < best) {
          best = s;
          surface = id;
        }
      };
      consider(o.x(), dir.x(), dir.x() > 0 ? corridor.half_width : -corridor.half_width, 0);
      consider(o.y(), dir.y(), dir.y() > 0 ? corridor.floor_y : corridor.ceiling_y, 1);
      if (dir.z() > 0) consider(o.z(), dir.z(), corridor.far_z, 2);
      if (surface < 0 || !std::isfinite(best) || best > kDefaultMaxDepth) continue;
      const Vec3 hit = o + best * dir;
      const size_t p = img.index(u, v);
      img.depth[p] = best;  // ray_cam has unit z, so the parameter is the camera-frame depth
      const int cx = static_cast<int>(std::floor(hit.z() / 2.0)) & 1;
      const int cy = static_cast<int>(std::floor((surface == 0 ? hit.y() : hit.x()) / 1.0)) & 1;
      Vec3 base;
      switch (surface) {
        case 0: base = hit.x() > 0 ? Vec3(0.8, 0.35, 0.3) : Vec3(0.3, 0.5, 0.8); break;
        case 1: base = dir.y() > 0 ? Vec3(0.45, 0.45, 0.45) : Vec3(0.9, 0.9, 0.85); break;
        default: base = Vec3(0.3, 0.7, 0.35); break;
      }
      const double shade = (cx ^ cy) ? 1.0 : 0.75;
      for (int c = 0; c < 3; ++c) img.rgb[p * 3 + c] = quantize(base[c] * shade);
    }
  }
  return img;
}

Trajectory straight_trajectory(const CameraIntrinsics& k, size_t n, double spacing) {
  Trajectory t{k, {}};
  for (size_t i = 0; i < n; ++i) t.poses.push_back(Pose::FromTranslation(Vec3(0.0, 0.0, spacing * double(i))));
  return t;
}

Trajectory yaw_trajectory(const CameraIntrinsics& k, size_t n, double step_deg) {
  Trajectory t{k, {}};
  for (size_t i = 0; i < n; ++i)
    t.poses.push_back({yaw_rotation(step_deg * double(i) * std::numbers::pi / 180.0), Vec3::Zero()});
  return t;
}

conditioning::SceneControls corridor_controls(const Corridor& corridor) {
  using conditioning::MapLayer;
  using conditioning::ObjectCategory;
  conditioning::SceneControls c;
  const double y = corridor.floor_y;
  c.polylines.push_back({{Vec3(-1.5, y, 0.0), Vec3(-1.5, y, corridor.far_z)}, MapLayer::kLaneBoundary});
  c.polylines.push_back({{Vec3(1.5, y, 0.0), Vec3(1.5, y, corridor.far_z)}, MapLayer::kLaneBoundary});
  c.polylines.push_back({{Vec3(0.0, y, 0.0), Vec3(0.0, y, corridor.far_z)}, MapLayer::kLaneDivider});
  c.polylines.push_back({{Vec3(-1.5, y, 25.0), Vec3(1.5, y, 25.0), Vec3(1.5, y, 27.0), Vec3(-1.5, y, 27.0)},
                         MapLayer::kPedestrianCrossing});
  c.boxes.push_back({Vec3(-0.75, y - 0.75, 18.0), Vec3(4.5, 1.8, 1.5), 0.0, ObjectCategory::kVehicle});
  c.boxes.push_back({Vec3(0.9, y - 0.9, 35.0), Vec3(0.6, 0.6, 1.8), 0.0, ObjectCategory::kPedestrian});
  return c;
}

}  // namespace scapegeom::synthetic
