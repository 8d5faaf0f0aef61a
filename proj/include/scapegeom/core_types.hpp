#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "scapegeom/errors.hpp"

namespace scapegeom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Pinhole intrinsics. Pixel (u, v) = (column, row), pixel centers at integer coordinates.
struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 1;
  int height = 1;

  bool operator==(const CameraIntrinsics&) const = default;
};

/// Rigid camera-to-world transform. Camera frame is x-right, y-down, z-forward.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static Pose Identity() { return {}; }
  static Pose FromTranslation(const Vec3& t) { return {Mat3::Identity(), t}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Pose inverse() const;
  /// (*this) ∘ other: apply other first, then this.
  Pose compose(const Pose& other) const;
  const Vec3& center() const { return translation; }

  bool operator==(const Pose& o) const {
    return rotation == o.rotation && translation == o.translation;
  }
};

/// Rotation about the camera y axis (yaw for a level, y-down camera).
Mat3 yaw_rotation(double radians);

struct Camera {
  CameraIntrinsics intrinsics;
  Pose pose;

  bool operator==(const Camera&) const = default;
};

/// Color in [0,1] (interleaved H×W×3, row-major) plus metric depth (H×W, 0 = no measurement).
struct RgbdImage {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;
  std::vector<double> depth;

  RgbdImage() = default;
  RgbdImage(int w, int h) : width(w), height(h), rgb(size_t(w) * h * 3, 0.0), depth(size_t(w) * h, 0.0) {}

  size_t pixel_count() const { return size_t(width) * size_t(height); }
  size_t index(int u, int v) const { return size_t(v) * size_t(width) + size_t(u); }

  double& r(size_t i, int c) { return rgb[i * 3 + c]; }
  double r(size_t i, int c) const { return rgb[i * 3 + c]; }

  bool operator==(const RgbdImage&) const = default;
};

struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Vec3> colors;
  std::vector<int> source_index;

  size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  void push_back(const Vec3& p, const Vec3& c, int source) {
    positions.push_back(p);
    colors.push_back(c);
    source_index.push_back(source);
  }

  bool operator==(const PointCloud&) const = default;
};

struct VisibilityMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> mask;

  VisibilityMask() = default;
  VisibilityMask(int w, int h, std::uint8_t fill = 0) : width(w), height(h), mask(size_t(w) * h, fill) {}

  size_t pixel_count() const { return size_t(width) * size_t(height); }
  size_t count() const;

  bool operator==(const VisibilityMask&) const = default;
};

/// Rendered keyframe points h plus visibility mask m at a target viewpoint.
struct RenderBundle {
  RgbdImage image;
  VisibilityMask mask;

  bool operator==(const RenderBundle&) const = default;
};

struct Trajectory {
  CameraIntrinsics intrinsics;
  std::vector<Pose> poses;

  size_t size() const { return poses.size(); }
  Camera camera(size_t i) const { return {intrinsics, poses.at(i)}; }
};

inline constexpr double kDefaultMaxDepth = 300.0;

Status validate(const CameraIntrinsics& k);
Status validate(const Pose& pose);
Status validate(const Camera& cam);
Status validate(const RgbdImage& image, double max_depth = kDefaultMaxDepth);
Status validate(const PointCloud& cloud);
Status validate(const VisibilityMask& mask);
Status validate(const RenderBundle& bundle);
Status validate(const Trajectory& traj);

/// Image dims equal the intrinsics' width/height.
Status check_dims(const RgbdImage& image, const CameraIntrinsics& k);

}  // namespace scapegeom
