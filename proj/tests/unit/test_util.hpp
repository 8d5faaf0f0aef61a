#pragma once

#include <Eigen/Geometry>

#include <filesystem>
#include <random>
#include <string>

#include "scapegeom/core_types.hpp"

namespace scapegeom::testing {

inline CameraIntrinsics intrinsics(int w, int h, double f = 50.0) {
  return {f, f, w / 2.0, h / 2.0, w, h};
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline Pose random_pose(std::mt19937_64& rng, double spread = 5.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  return {random_rotation(rng), Vec3(u(rng), u(rng), u(rng))};
}

/// Colors on the 8-bit grid, depths uniform in [dmin, dmax]; hole_prob of pixels get depth 0.
inline RgbdImage random_image(std::mt19937_64& rng, int w, int h, double dmin, double dmax, double hole_prob = 0.0) {
  RgbdImage img(w, h);
  std::uniform_int_distribution<int> code(0, 255);
  std::uniform_real_distribution<double> d(dmin, dmax), u01(0.0, 1.0);
  for (double& c : img.rgb) c = code(rng) / 255.0;
  for (double& z : img.depth) z = u01(rng) < hole_prob ? 0.0 : d(rng);
  return img;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("scapegeom_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace scapegeom::testing
