#include "scapegeom/core_types.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace scapegeom {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonOrthonormalRotation: return "NonOrthonormalRotation";
    case ErrorKind::kOutOfRangeValue: return "OutOfRangeValue";
    case ErrorKind::kEmptyOverlap: return "EmptyOverlap";
    case ErrorKind::kNegativeDepth: return "NegativeDepth";
    case ErrorKind::kTimestepOutOfRange: return "TimestepOutOfRange";
    case ErrorKind::kNonDivisibleFactor: return "NonDivisibleFactor";
    case ErrorKind::kGeneratorFailure: return "GeneratorFailure";
    case ErrorKind::kCorruptManifest: return "CorruptManifest";
    case ErrorKind::kMissingFile: return "MissingFile";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

Pose Pose::inverse() const {
  const Mat3 rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

Pose Pose::compose(const Pose& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

Mat3 yaw_rotation(double radians) {
  const double c = std::cos(radians);
  const double s = std::sin(radians);
  Mat3 r;
  r << c, 0.0, s,
       0.0, 1.0, 0.0,
       -s, 0.0, c;
  return r;
}

size_t VisibilityMask::count() const {
  return static_cast<size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

namespace {

constexpr double kOrthoTol = 1e-6;

std::string fmt_pixel(size_t i, int width) {
  std::ostringstream os;
  os << "pixel (" << (i % size_t(width)) << ", " << (i / size_t(width)) << ")";
  return os.str();
}

}  // namespace

Status validate(const CameraIntrinsics& k) {
  if (k.width < 1 || k.height < 1)
    return Status::Fail(ErrorKind::kDimensionMismatch, "image size must be at least 1x1");
  if (!(k.fx > 0.0) || !(k.fy > 0.0) || !std::isfinite(k.fx) || !std::isfinite(k.fy))
    return Status::Fail(ErrorKind::kOutOfRangeValue, "focal lengths must be positive and finite");
  if (!(k.cx >= 0.0 && k.cx < k.width) || !(k.cy >= 0.0 && k.cy < k.height))
    return Status::Fail(ErrorKind::kOutOfRangeValue, "principal point outside the image");
  return Status::Ok();
}

Status validate(const Pose& pose) {
  if (!pose.rotation.allFinite() || !pose.translation.allFinite())
    return Status::Fail(ErrorKind::kOutOfRangeValue, "pose has non-finite entries");
  const Mat3 rtr = pose.rotation.transpose() * pose.rotation;
  if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > kOrthoTol)
    return Status::Fail(ErrorKind::kNonOrthonormalRotation, "R^T R differs from identity");
  if (std::abs(pose.rotation.determinant() - 1.0) > kOrthoTol)
    return Status::Fail(ErrorKind::kNonOrthonormalRotation, "det(R) differs from +1");
  return Status::Ok();
}

Status validate(const Camera& cam) {
  if (auto s = validate(cam.intrinsics); !s) return s;
  return validate(cam.pose);
}

Status validate(const RgbdImage& image, double max_depth) {
  if (image.width < 1 || image.height < 1)
    return Status::Fail(ErrorKind::kDimensionMismatch, "image must be at least 1x1");
  if (image.rgb.size() != image.pixel_count() * 3 || image.depth.size() != image.pixel_count())
    return Status::Fail(ErrorKind::kDimensionMismatch, "rgb/depth buffer sizes disagree with width x height");
  for (size_t i = 0; i < image.rgb.size(); ++i) {
    const double c = image.rgb[i];
    if (!(c >= 0.0 && c <= 1.0))
      return Status::Fail(ErrorKind::kOutOfRangeValue, "rgb outside [0,1] at " + fmt_pixel(i / 3, image.width));
  }
  for (size_t i = 0; i < image.depth.size(); ++i) {
    const double d = image.depth[i];
    if (!(d >= 0.0 && d <= max_depth))
      return Status::Fail(ErrorKind::kOutOfRangeValue, "depth outside [0, max_depth] at " + fmt_pixel(i, image.width));
  }
  return Status::Ok();
}

Status validate(const PointCloud& cloud) {
  const size_t n = cloud.positions.size();
  if (cloud.colors.size() != n || cloud.source_index.size() != n)
    return Status::Fail(ErrorKind::kDimensionMismatch, "positions/colors/source_index lengths differ");
  for (size_t i = 0; i < n; ++i) {
    if (!cloud.positions[i].allFinite())
      return Status::Fail(ErrorKind::kOutOfRangeValue, "non-finite position at point " + std::to_string(i));
    const Vec3& c = cloud.colors[i];
    if (!(c.minCoeff() >= 0.0 && c.maxCoeff() <= 1.0))
      return Status::Fail(ErrorKind::kOutOfRangeValue, "color outside [0,1] at point " + std::to_string(i));
  }
  return Status::Ok();
}

Status validate(const VisibilityMask& mask) {
  if (mask.mask.size() != mask.pixel_count())
    return Status::Fail(ErrorKind::kDimensionMismatch, "mask buffer size disagrees with width x height");
  for (size_t i = 0; i < mask.mask.size(); ++i)
    if (mask.mask[i] > 1)
      return Status::Fail(ErrorKind::kOutOfRangeValue, "mask not binary at " + fmt_pixel(i, mask.width));
  return Status::Ok();
}

Status validate(const RenderBundle& bundle) {
  // Rendered depth may exceed the codec range, so only sizes and the hole rule are checked here.
  const RgbdImage& img = bundle.image;
  if (img.rgb.size() != img.pixel_count() * 3 || img.depth.size() != img.pixel_count())
    return Status::Fail(ErrorKind::kDimensionMismatch, "bundle image buffers disagree with width x height");
  if (auto s = validate(bundle.mask); !s) return s;
  if (bundle.mask.width != img.width || bundle.mask.height != img.height)
    return Status::Fail(ErrorKind::kDimensionMismatch, "mask and image dims differ");
  for (size_t i = 0; i < img.pixel_count(); ++i)
    if (bundle.mask.mask[i] == 0 && img.depth[i] != 0.0)
      return Status::Fail(ErrorKind::kOutOfRangeValue, "depth set outside mask at " + fmt_pixel(i, img.width));
  return Status::Ok();
}

Status validate(const Trajectory& traj) {
  if (traj.poses.empty()) return Status::Fail(ErrorKind::kDimensionMismatch, "trajectory is empty");
  if (auto s = validate(traj.intrinsics); !s) return s;
  for (size_t i = 0; i < traj.poses.size(); ++i)
    if (auto s = validate(traj.poses[i]); !s) {
      s.message = "pose " + std::to_string(i) + ": " + s.message;
      return s;
    }
  return Status::Ok();
}

Status check_dims(const RgbdImage& image, const CameraIntrinsics& k) {
  if (image.width != k.width || image.height != k.height)
    return Status::Fail(ErrorKind::kDimensionMismatch,
                        "image is " + std::to_string(image.width) + "x" + std::to_string(image.height) +
                            " but camera expects " + std::to_string(k.width) + "x" + std::to_string(k.height));
  if (image.rgb.size() != image.pixel_count() * 3 || image.depth.size() != image.pixel_count())
    return Status::Fail(ErrorKind::kDimensionMismatch, "rgb/depth buffer sizes disagree with width x height");
  return Status::Ok();
}

}  // namespace scapegeom
