#include "scapegeom/keyframe_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace scapegeom::pipeline {

Status validate(const KeyframeSelectionConfig& cfg) {
  if (!(cfg.beta > 0.0)) return Status::Fail(ErrorKind::kOutOfRangeValue, "beta must be > 0");
  if (!(cfg.gamma > 0.0 && cfg.gamma < 180.0))
    return Status::Fail(ErrorKind::kOutOfRangeValue, "gamma must lie in (0, 180) degrees");
  return Status::Ok();
}

double rotation_angle_deg(const Mat3& a, const Mat3& b) {
  const Mat3 rel = a.transpose() * b;
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c) * 180.0 / std::numbers::pi;
}

std::vector<size_t> select_keyframes(const Trajectory& traj, const KeyframeSelectionConfig& cfg) {
  validate(cfg).throw_if_error();
  if (traj.poses.empty()) throw Error(ErrorKind::kDimensionMismatch, "trajectory is empty");
  // Slack keeps exact-threshold spacing (e.g. 10 poses of 1 m) from failing on rounding.
  constexpr double kSlack = 1e-9;
  std::vector<size_t> out{0};
  for (size_t i = 1; i < traj.poses.size(); ++i) {
    const Pose& last = traj.poses[out.back()];
    const Pose& cur = traj.poses[i];
    const double dist = (cur.translation - last.translation).norm();
    const double angle = rotation_angle_deg(last.rotation, cur.rotation);
    if (dist >= cfg.beta - kSlack || angle >= cfg.gamma - kSlack) out.push_back(i);
  }
  if (out.back() != traj.poses.size() - 1) out.push_back(traj.poses.size() - 1);
  return out;
}

std::vector<size_t> order_viewpoints(const Trajectory& traj, std::span<const size_t> keyframes,
                                     const Camera& start_camera) {
  if (keyframes.empty()) return {};
  for (size_t k : keyframes)
    if (k >= traj.poses.size())
      throw Error(ErrorKind::kOutOfRangeValue, "keyframe index " + std::to_string(k) + " outside trajectory");
  std::vector<size_t> remaining(keyframes.begin(), keyframes.end());
  std::sort(remaining.begin(), remaining.end());
  remaining.erase(std::unique(remaining.begin(), remaining.end()), remaining.end());

  auto dist = [&](size_t k, const Vec3& from) { return (traj.poses[k].translation - from).norm(); };
  std::vector<size_t> order;
  // Farthest from the start camera first; lower index wins ties.
  size_t best = 0;
  for (size_t j = 1; j < remaining.size(); ++j)
    if (dist(remaining[j], start_camera.pose.translation) > dist(remaining[best], start_camera.pose.translation))
      best = j;
  while (true) {
    const size_t current = remaining[best];
    order.push_back(current);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best));
    if (remaining.empty()) break;
    const Vec3 here = traj.poses[current].translation;
    best = 0;
    for (size_t j = 1; j < remaining.size(); ++j)
      if (dist(remaining[j], here) < dist(remaining[best], here)) best = j;
  }
  return order;
}

RgbdImage CopyThroughGenerator::generate(const RenderBundle& bundle, const Camera& camera,
                                         const conditioning::ControlImages*) {
  check_dims(bundle.image, camera.intrinsics).throw_if_error();
  RgbdImage out = bundle.image;
  for (size_t p = 0; p < out.pixel_count(); ++p) {
    if (bundle.mask.mask[p]) {
      out.depth[p] = std::min(out.depth[p], codec_.max_depth);
    } else {
      for (int c = 0; c < 3; ++c) out.rgb[p * 3 + c] = kHoleGray;
      out.depth[p] = codec_.max_depth;
    }
  }
  return out;
}

NoisyCopyGenerator::NoisyCopyGenerator(std::uint64_t seed, double rgb_sigma, double depth_sigma,
                                       depth::DepthCodecConfig codec)
    : copy_(codec), rng_(seed), rgb_sigma_(rgb_sigma), depth_sigma_(depth_sigma), codec_(codec) {}

RgbdImage NoisyCopyGenerator::generate(const RenderBundle& bundle, const Camera& camera,
                                       const conditioning::ControlImages* controls) {
  RgbdImage out = copy_.generate(bundle, camera, controls);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& c : out.rgb) c = std::clamp(c + rgb_sigma_ * n(rng_), 0.0, 1.0);
  for (double& d : out.depth) d = std::clamp(d * (1.0 + depth_sigma_ * n(rng_)), 1e-2, codec_.max_depth);
  return out;
}

GuidedDiffusionGenerator::GuidedDiffusionGenerator(std::uint64_t seed, Options options)
    : seed_(seed), options_(options), schedule_(diffusion::NoiseSchedule::default_linear(options.steps)) {}

RgbdImage GuidedDiffusionGenerator::generate(const RenderBundle& bundle, const Camera& camera,
                                             const conditioning::ControlImages*) {
  check_dims(bundle.image, camera.intrinsics).throw_if_error();
  const int w = camera.intrinsics.width, h = camera.intrinsics.height;
  const double prior_depth = depth::normalize_depth(options_.prior_depth, options_.codec);
  std::vector<double> mean(size_t(w) * h * consistency::kChannels);
  for (size_t p = 0; p < mean.size() / 4; ++p) {
    mean[p * 4 + 0] = mean[p * 4 + 1] = mean[p * 4 + 2] = options_.prior_gray;
    mean[p * 4 + 3] = prior_depth;
  }
  const diffusion::AnalyticGaussianDenoiser prior(std::move(mean), options_.prior_sigma);
  diffusion::GuidanceConfig guidance;
  guidance.w = bundle.mask.count() > 0 ? options_.w : 0.0;
  guidance.consistency = options_.consistency;
  guidance.codec = options_.codec;
  const auto x = diffusion::sample(prior, schedule_, size_t(w) * h * consistency::kChannels, &bundle, &guidance,
                                   diffusion::derive_seed(seed_, calls_++));
  RgbdImage out = consistency::from_normalized(x, w, h, options_.codec);
  for (double& c : out.rgb) c = std::clamp(c, 0.0, 1.0);
  for (double& d : out.depth) d = std::clamp(d, 0.1, options_.codec.max_depth);
  return out;
}

size_t nearest_endpoint(const Trajectory& traj, const Camera& camera) {
  if (traj.poses.empty()) throw Error(ErrorKind::kDimensionMismatch, "trajectory is empty");
  const size_t last = traj.poses.size() - 1;
  const double d0 = (traj.poses.front().translation - camera.pose.translation).norm();
  const double d1 = (traj.poses.back().translation - camera.pose.translation).norm();
  return d1 < d0 ? last : 0;
}

SceneState generate_scene(const RgbdImage& initial, const Camera& initial_camera, const Trajectory& traj,
                          std::span<const size_t> keyframe_indices, Generator& generator,
                          const conditioning::SceneControls* controls, const PipelineOptions& options) {
  validate(traj).throw_if_error();
  validate(initial_camera).throw_if_error();
  validate(initial, options.codec.max_depth).throw_if_error();
  check_dims(initial, initial_camera.intrinsics).throw_if_error();

  SceneState scene;
  const size_t start = nearest_endpoint(traj, initial_camera);
  {
    GeneratedKeyframe first;
    first.trajectory_index = start;
    first.camera = initial_camera;
    first.image = initial;
    first.bundle = {RgbdImage(initial.width, initial.height), VisibilityMask(initial.width, initial.height)};
    PointCloud pts = projection::back_project(initial, initial_camera, 0);
    first.points_added = pts.size();
    scene.cloud = std::move(pts);
    scene.visit_order.push_back(start);
    scene.keyframes.push_back(std::move(first));
  }

  for (size_t idx : order_viewpoints(traj, keyframe_indices, initial_camera)) {
    if (idx == start) continue;
    const Camera camera = traj.camera(idx);
    GeneratedKeyframe kf;
    kf.trajectory_index = idx;
    kf.camera = camera;
    kf.bundle = projection::render_points(scene.cloud, camera, options.render);

    std::optional<conditioning::ControlImages> control_images;
    if (controls) control_images = conditioning::rasterize_controls(*controls, camera);
    try {
      kf.image = generator.generate(kf.bundle, camera, control_images ? &*control_images : nullptr);
    } catch (const std::exception& e) {
      throw Error(ErrorKind::kGeneratorFailure,
                  "generator '" + generator.name() + "' failed at keyframe " + std::to_string(idx) + ": " + e.what());
    }
    if (auto s = check_dims(kf.image, camera.intrinsics); !s)
      throw Error(ErrorKind::kGeneratorFailure, "keyframe " + std::to_string(idx) + ": " + s.message);

    try {
      kf.warp_loss = consistency::warp_loss(kf.image, kf.bundle.image, kf.bundle.mask, options.consistency,
                                            options.codec);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kEmptyOverlap) throw;
    }

    const int source = static_cast<int>(scene.keyframes.size());
    PointCloud pts = projection::back_project(kf.image, camera, source);
    kf.points_added = pts.size();
    projection::append_cloud(scene.cloud, pts);
    scene.visit_order.push_back(idx);
    scene.keyframes.push_back(std::move(kf));
  }
  return scene;
}

}  // namespace scapegeom::pipeline
