#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "scapegeom/conditioning.hpp"
#include "scapegeom/consistency.hpp"
#include "scapegeom/core_types.hpp"
#include "scapegeom/depth_codec.hpp"
#include "scapegeom/diffusion.hpp"
#include "scapegeom/projection.hpp"

namespace scapegeom::pipeline {

struct KeyframeSelectionConfig {
  double beta = 10.0;   // meters
  double gamma = 20.0;  // degrees
};

Status validate(const KeyframeSelectionConfig& cfg);

/// Geodesic angle between two rotations, degrees.
double rotation_angle_deg(const Mat3& a, const Mat3& b);

/// Index 0, then every pose whose distance (>= beta) or view angle (>= gamma) from the last
/// selected pose crosses a threshold; the final pose is always appended.
std::vector<size_t> select_keyframes(const Trajectory& traj, const KeyframeSelectionConfig& cfg = {});

/// Starts at the keyframe whose camera center is farthest from start_camera, then repeatedly
/// moves to the nearest unvisited keyframe. Ties go to the lower trajectory index.
std::vector<size_t> order_viewpoints(const Trajectory& traj, std::span<const size_t> keyframes,
                                     const Camera& start_camera);

/// Fills the holes of a rendered bundle into a complete RGB-D keyframe.
class Generator {
 public:
  virtual ~Generator() = default;
  virtual RgbdImage generate(const RenderBundle& bundle, const Camera& camera,
                             const conditioning::ControlImages* controls) = 0;
  virtual std::string name() const = 0;
};

/// Keeps every rendered pixel (depth clamped to max_depth); holes become gray 128/255 at max_depth.
class CopyThroughGenerator : public Generator {
 public:
  explicit CopyThroughGenerator(depth::DepthCodecConfig codec = {}) : codec_(codec) {}
  RgbdImage generate(const RenderBundle& bundle, const Camera& camera,
                     const conditioning::ControlImages* controls) override;
  std::string name() const override { return "copy"; }

  static constexpr double kHoleGray = 128.0 / 255.0;

 private:
  depth::DepthCodecConfig codec_;
};

/// Copy-through plus seeded Gaussian perturbation; used to exercise non-zero warp losses.
class NoisyCopyGenerator : public Generator {
 public:
  NoisyCopyGenerator(std::uint64_t seed, double rgb_sigma = 0.02, double depth_sigma = 0.05,
                     depth::DepthCodecConfig codec = {});
  RgbdImage generate(const RenderBundle& bundle, const Camera& camera,
                     const conditioning::ControlImages* controls) override;
  std::string name() const override { return "noisy"; }

 private:
  CopyThroughGenerator copy_;
  std::mt19937_64 rng_;
  double rgb_sigma_;
  double depth_sigma_;
  depth::DepthCodecConfig codec_;
};

/// Samples the keyframe from an analytic Gaussian prior over the normalized RGB-D layout with
/// warp-consistent guidance toward the rendered points.
class GuidedDiffusionGenerator : public Generator {
 public:
  struct Options {
    int steps = 50;
    double prior_gray = 0.5;
    double prior_depth = 30.0;  // meters
    double prior_sigma = 0.2;
    double w = 50.0;
    consistency::ConsistencyConfig consistency;
    depth::DepthCodecConfig codec;
  };

  GuidedDiffusionGenerator(std::uint64_t seed, Options options);
  RgbdImage generate(const RenderBundle& bundle, const Camera& camera,
                     const conditioning::ControlImages* controls) override;
  std::string name() const override { return "diffusion"; }

 private:
  std::uint64_t seed_;
  std::uint64_t calls_ = 0;
  Options options_;
  diffusion::NoiseSchedule schedule_;
};

struct GeneratedKeyframe {
  size_t trajectory_index = 0;
  Camera camera;
  RgbdImage image;
  RenderBundle bundle;              // what the generator was conditioned on
  std::optional<double> warp_loss;  // empty when the bundle had no overlap
  size_t points_added = 0;
};

struct SceneState {
  PointCloud cloud;
  std::vector<GeneratedKeyframe> keyframes;  // keyframes[0] is the initial frame
  std::vector<size_t> visit_order;           // trajectory indices in generation order
};

struct PipelineOptions {
  consistency::ConsistencyConfig consistency;
  depth::DepthCodecConfig codec;
  projection::RenderOptions render;
};

/// Autoregressive render -> generate -> back-project -> merge loop, visiting keyframes from the far
/// end of the trajectory back toward the initial frame.
SceneState generate_scene(const RgbdImage& initial, const Camera& initial_camera, const Trajectory& traj,
                          std::span<const size_t> keyframe_indices, Generator& generator,
                          const conditioning::SceneControls* controls = nullptr,
                          const PipelineOptions& options = {});

/// The trajectory endpoint (0 or last) whose camera center is closest to the camera.
size_t nearest_endpoint(const Trajectory& traj, const Camera& camera);

}  // namespace scapegeom::pipeline
