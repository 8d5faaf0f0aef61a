#pragma once

#include <optional>
#include <span>

#include "scapegeom/core_types.hpp"

namespace scapegeom::projection {

inline constexpr double kZNear = 1e-3;  // meters

struct RenderOptions {
  /// Each point also covers the (2r+1)^2 pixel square around its projection.
  int splat_radius = 0;
  double z_near = kZNear;
};

/// Continuous pixel coordinates of a camera-frame point.
struct PixelCoord {
  double u;
  double v;
};

/// World -> camera frame for a camera-to-world pose: R^T (p - t), evaluated in a fixed scalar order.
Vec3 world_to_camera(const Pose& pose, const Vec3& world);
/// Camera -> world: R p + t, fixed scalar order.
Vec3 camera_to_world(const Pose& pose, const Vec3& cam);

/// Projects a camera-frame point; nullopt when z <= z_near.
std::optional<PixelCoord> project(const CameraIntrinsics& k, const Vec3& cam, double z_near = kZNear);

/// floor(x + 0.5); ties round toward +inf on both axes.
long long round_half_up(double x);

/// One world-frame point per pixel with depth > 0, colors copied, tagged with source_index.
PointCloud back_project(const RgbdImage& image, const Camera& camera, int source_index = 0);

/// Nearest-pixel z-buffered splatting. Per pixel the smallest camera depth wins, ties go to the
/// lowest point index. Output is independent of the worker count.
RenderBundle render_points(const PointCloud& cloud, const Camera& camera, const RenderOptions& options = {});

/// Positions mapped by R p + t; colors and source indices unchanged.
PointCloud transform_cloud(const PointCloud& cloud, const Pose& pose);

/// Order-preserving concatenation.
PointCloud merge_clouds(std::span<const PointCloud> clouds);
void append_cloud(PointCloud& into, const PointCloud& from);

}  // namespace scapegeom::projection
