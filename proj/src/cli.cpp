#include "scapegeom/cli.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>

#include "CLI11.hpp"

#include "scapegeom/conditioning.hpp"
#include "scapegeom/consistency.hpp"
#include "scapegeom/depth_codec.hpp"
#include "scapegeom/diffusion.hpp"
#include "scapegeom/interpolation.hpp"
#include "scapegeom/io.hpp"
#include "scapegeom/keyframe_pipeline.hpp"
#include "scapegeom/projection.hpp"
#include "scapegeom/synthetic.hpp"

namespace scapegeom::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string frame_name(const char* prefix, size_t i, const char* suffix) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s%03zu%s", prefix, i, suffix);
  return buf;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

// ---- subcommand option blocks --------------------------------------------------------------------

struct BackprojectArgs {
  std::string rgb, depth, camera, out;
  double max_depth = kDefaultMaxDepth;
  int source_index = 0;
};

struct RenderArgs {
  std::string cloud, camera, out_dir;
  int splat_radius = 0;
  double max_depth = kDefaultMaxDepth;
};

struct LossArgs {
  std::string rgb_a, depth_a, rgb_b, depth_b, mask;
  double trim = 0.05;
  double depth_weight = 1.0;
  double max_depth = kDefaultMaxDepth;
};

struct FilterArgs {
  std::string losses;
  double drop = 0.2;
};

struct SelectArgs {
  std::string trajectory;
  double beta = 10.0;
  double gamma = 20.0;
};

struct PipelineArgs {
  std::string scene, trajectory, out, generator = "copy";
  std::optional<std::uint64_t> seed;
  double beta = 10.0, gamma = 20.0, trim = 0.05, depth_weight = 1.0, w = 50.0;
  int splat_radius = 0, steps = 50;
};

struct RasterizeArgs {
  std::string camera, map, boxes, out_dir;
  int downsample = 0;
  std::string mask;
};

struct InterpolateArgs {
  std::string kf1, kf2, trajectory, out;
  double max_depth = kDefaultMaxDepth;
  int splat_radius = 0;
};

struct SampleArgs {
  int steps = 50;
  double w = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> beta_start, beta_end;
  double mu = 0.0, sigma = 1.0, trim = 0.0;
  std::optional<double> target;
  std::string bundle, variance = "posterior";
  size_t num_samples = 1000, dim = 1;
  bool summary_only = false;
};

struct DemoArgs {
  std::string out;
  int width = 64, height = 48;
  size_t poses = 31;
};

// ---- implementations ----------------------------------------------------------------------------

int cmd_backproject(const BackprojectArgs& a, std::ostream& out) {
  const depth::DepthCodecConfig codec{a.max_depth};
  const RgbdImage img = io::read_rgbd(a.rgb, a.depth, codec);
  const Camera cam = io::camera_from_json(io::read_json(a.camera));
  const PointCloud cloud = projection::back_project(img, cam, a.source_index);
  io::write_ply(a.out, cloud);
  out << json{{"points", cloud.size()}, {"output", a.out}}.dump() << '\n';
  return kExitOk;
}

int cmd_render(const RenderArgs& a, std::ostream& out) {
  const PointCloud cloud = io::read_ply(a.cloud);
  const Camera cam = io::camera_from_json(io::read_json(a.camera));
  const RenderBundle b = projection::render_points(cloud, cam, {a.splat_radius, projection::kZNear});
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  io::write_rgbd(dir / "rgb.png", dir / "depth.png", b.image, {a.max_depth});
  io::write_mask_png(dir / "mask.png", b.mask);
  out << json{{"visible_pixels", b.mask.count()}, {"output", a.out_dir}}.dump() << '\n';
  return kExitOk;
}

int cmd_loss(const LossArgs& a, std::ostream& out) {
  const depth::DepthCodecConfig codec{a.max_depth};
  const RgbdImage x = io::read_rgbd(a.rgb_a, a.depth_a, codec);
  const RgbdImage h = io::read_rgbd(a.rgb_b, a.depth_b, codec);
  const VisibilityMask m = io::read_mask_png(a.mask);
  const auto r = consistency::warp_loss_detailed(x, h, m, {a.trim, a.depth_weight}, codec);
  out << json{{"loss", r.loss}, {"kept_pixels", r.kept_pixels}, {"trimmed_pixels", r.trimmed_pixels}}.dump() << '\n';
  return kExitOk;
}

int cmd_filter(const FilterArgs& a, std::ostream& out) {
  const json j = io::read_json(a.losses);
  const auto losses = (j.is_object() ? j.at("losses") : j).get<std::vector<double>>();
  const auto kept = consistency::filter_dataset(losses, a.drop);
  std::vector<size_t> dropped;
  for (size_t i = 0, k = 0; i < losses.size(); ++i) {
    if (k < kept.size() && kept[k] == i)
      ++k;
    else
      dropped.push_back(i);
  }
  out << json{{"kept", kept}, {"dropped", dropped}}.dump() << '\n';
  return kExitOk;
}

int cmd_select(const SelectArgs& a, std::ostream& out) {
  const Trajectory traj = io::trajectory_from_json(io::read_json(a.trajectory));
  out << json(pipeline::select_keyframes(traj, {a.beta, a.gamma})).dump() << '\n';
  return kExitOk;
}

int cmd_pipeline(const PipelineArgs& a, std::ostream& out) {
  const fs::path scene_path(a.scene);
  const json scene = io::read_json(scene_path);
  const fs::path base = scene_path.parent_path();
  const depth::DepthCodecConfig codec{scene.value("max_depth", kDefaultMaxDepth)};
  const RgbdImage initial = io::read_rgbd(resolve(base, scene.at("rgb").get<std::string>()),
                                          resolve(base, scene.at("depth").get<std::string>()), codec);
  const Camera initial_camera = io::camera_from_json(scene.at("camera"));
  std::optional<conditioning::SceneControls> controls;
  if (scene.contains("controls")) {
    const json& c = scene.at("controls");
    controls = conditioning::SceneControls{
        c.contains("polylines") ? io::polylines_from_json(c.at("polylines")) : std::vector<conditioning::MapPolyline>{},
        c.contains("boxes") ? io::boxes_from_json(c.at("boxes")) : std::vector<conditioning::ObjectBox>{}};
  }
  const Trajectory traj = io::trajectory_from_json(io::read_json(a.trajectory));

  std::unique_ptr<pipeline::Generator> gen;
  if (a.generator == "copy") {
    gen = std::make_unique<pipeline::CopyThroughGenerator>(codec);
  } else if (a.generator == "noisy") {
    gen = std::make_unique<pipeline::NoisyCopyGenerator>(*a.seed, 0.02, 0.05, codec);
  } else {
    pipeline::GuidedDiffusionGenerator::Options o;
    o.steps = a.steps;
    o.w = a.w;
    o.consistency = {a.trim, a.depth_weight};
    o.codec = codec;
    gen = std::make_unique<pipeline::GuidedDiffusionGenerator>(*a.seed, o);
  }

  pipeline::PipelineOptions opts;
  opts.consistency = {a.trim, a.depth_weight};
  opts.codec = codec;
  opts.render.splat_radius = a.splat_radius;
  const auto keyframes = pipeline::select_keyframes(traj, {a.beta, a.gamma});
  const auto state = pipeline::generate_scene(initial, initial_camera, traj, keyframes, *gen,
                                              controls ? &*controls : nullptr, opts);
  io::write_scene(a.out, state, codec);
  if (controls) {
    for (size_t i = 0; i < state.keyframes.size(); ++i) {
      const auto imgs = conditioning::rasterize_controls(*controls, state.keyframes[i].camera);
      const fs::path dir = fs::path(a.out) / frame_name("keyframes/kf_", i, "");
      io::write_color_png(dir / "control_map.png", imgs.map_image);
      io::write_color_png(dir / "control_semantic_boxes.png", imgs.semantic_box_image);
      io::write_color_png(dir / "control_orientation_boxes.png", imgs.orientation_box_image);
    }
  }
  json losses = json::array();
  for (const auto& kf : state.keyframes) losses.push_back(kf.warp_loss ? json(*kf.warp_loss) : json(nullptr));
  out << json{{"keyframes", keyframes},
              {"visit_order", state.visit_order},
              {"warp_losses", losses},
              {"points", state.cloud.size()},
              {"output", a.out}}
             .dump()
      << '\n';
  return kExitOk;
}

int cmd_rasterize(const RasterizeArgs& a, std::ostream& out) {
  const Camera cam = io::camera_from_json(io::read_json(a.camera));
  const auto lines = a.map.empty() ? std::vector<conditioning::MapPolyline>{} : io::polylines_from_json(io::read_json(a.map));
  const auto boxes = a.boxes.empty() ? std::vector<conditioning::ObjectBox>{} : io::boxes_from_json(io::read_json(a.boxes));
  const auto imgs = conditioning::rasterize_controls({lines, boxes}, cam);
  const fs::path dir(a.out_dir);
  fs::create_directories(dir);
  io::write_color_png(dir / "map.png", imgs.map_image);
  io::write_color_png(dir / "semantic_boxes.png", imgs.semantic_box_image);
  io::write_color_png(dir / "orientation_boxes.png", imgs.orientation_box_image);
  json result{{"polylines", lines.size()}, {"boxes", boxes.size()}, {"output", a.out_dir}};
  if (!a.mask.empty()) {
    const auto small = conditioning::downsample_mask(io::read_mask_png(a.mask), a.downsample);
    io::write_mask_png(dir / "mask_latent.png", small);
    result["mask_latent"] = {small.width, small.height};
  }
  out << result.dump() << '\n';
  return kExitOk;
}

interpolation::Keyframe read_keyframe_dir(const fs::path& dir, const depth::DepthCodecConfig& codec) {
  return {io::read_rgbd(dir / "rgb.png", dir / "depth.png", codec), io::camera_from_json(io::read_json(dir / "camera.json"))};
}

int cmd_interpolate(const InterpolateArgs& a, std::ostream& out) {
  const depth::DepthCodecConfig codec{a.max_depth};
  interpolation::InterpolationRequest req;
  req.first = read_keyframe_dir(a.kf1, codec);
  req.second = read_keyframe_dir(a.kf2, codec);
  const Trajectory slice = io::trajectory_from_json(io::read_json(a.trajectory));
  for (size_t i = 0; i < slice.size(); ++i) req.cameras.push_back(slice.camera(i));
  const auto bundles = interpolation::render_interpolation_conditions(req, {a.splat_radius, projection::kZNear});
  const auto frames = interpolation::refine_stub(bundles);
  const fs::path dir(a.out);
  fs::create_directories(dir);
  json entries = json::array();
  for (size_t i = 0; i < frames.size(); ++i) {
    const auto& b = bundles[i];
    io::write_rgb_png(dir / frame_name("frame_", i, "_rgb.png"), frames[i].width, frames[i].height, frames[i].rgb);
    io::write_rgb_png(dir / frame_name("frame_", i, "_condition.png"), b.image.width, b.image.height, b.image.rgb);
    io::write_mask_png(dir / frame_name("frame_", i, "_mask.png"), b.mask);
    entries.push_back({{"rgb", frame_name("frame_", i, "_rgb.png")},
                       {"condition", frame_name("frame_", i, "_condition.png")},
                       {"mask", frame_name("frame_", i, "_mask.png")},
                       {"camera", io::to_json(req.cameras[i])},
                       {"visible_pixels", b.mask.count()}});
  }
  io::write_json(dir / "manifest.json", json{{"frames", entries}, {"refiner", "nearest-valid-pixel stub"}});
  out << json{{"frames", frames.size()}, {"output", a.out}}.dump() << '\n';
  return kExitOk;
}

int cmd_sample(const SampleArgs& a, std::ostream& out) {
  if (a.beta_start.has_value() != a.beta_end.has_value())
    throw UsageError("--beta-start and --beta-end must be given together");
  const diffusion::NoiseSchedule schedule = a.beta_start ? diffusion::NoiseSchedule::linear(a.steps, *a.beta_start, *a.beta_end)
                                                         : diffusion::NoiseSchedule::default_linear(a.steps);
  const auto denoiser = diffusion::analytic_gaussian_denoiser(a.mu, a.sigma);

  std::optional<RenderBundle> bundle;
  diffusion::GuidanceConfig guidance;
  guidance.w = a.w;
  guidance.consistency = {a.trim, 1.0};
  if (!a.bundle.empty()) {
    const fs::path dir(a.bundle);
    bundle = RenderBundle{io::read_rgbd(dir / "rgb.png", dir / "depth.png", guidance.codec), io::read_mask_png(dir / "mask.png")};
  } else if (a.target) {
    // One fully visible pixel whose four normalized channels all equal the target.
    RenderBundle b{RgbdImage(1, 1), VisibilityMask(1, 1, 1)};
    b.image.rgb = {*a.target, *a.target, *a.target};
    b.image.depth = {*a.target * guidance.codec.max_depth};
    bundle = b;
  } else if (a.w > 0.0) {
    throw UsageError("--w > 0 needs --bundle or --target");
  }
  const size_t dim = bundle ? bundle->image.pixel_count() * consistency::kChannels : a.dim;
  diffusion::SamplerOptions opts;
  opts.variance = a.variance == "forward" ? diffusion::ReverseVariance::kForward : diffusion::ReverseVariance::kPosterior;
  const auto samples = diffusion::sample_batch(*denoiser, schedule, dim, bundle ? &*bundle : nullptr,
                                               bundle ? &guidance : nullptr, a.seed, a.num_samples, opts);
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& s : samples)
    for (size_t i = 0; i < dim; ++i) mean[i] += s[i];
  for (double& m : mean) m /= static_cast<double>(samples.size());
  for (const auto& s : samples)
    for (size_t i = 0; i < dim; ++i) var[i] += (s[i] - mean[i]) * (s[i] - mean[i]);
  for (double& v : var) v /= static_cast<double>(samples.size() > 1 ? samples.size() - 1 : 1);
  json result{{"steps", a.steps}, {"w", a.w}, {"seed", a.seed}, {"count", samples.size()}, {"mean", mean}, {"variance", var}};
  if (!a.summary_only) result["samples"] = samples;
  out << result.dump() << '\n';
  return kExitOk;
}

int cmd_demo(const DemoArgs& a, std::ostream& out) {
  const fs::path dir(a.out);
  fs::create_directories(dir);
  const CameraIntrinsics k{a.width * 0.8, a.width * 0.8, a.width / 2.0, a.height / 2.0, a.width, a.height};
  const synthetic::Corridor corridor;
  const Trajectory traj = synthetic::straight_trajectory(k, a.poses, 1.0);
  const Camera start = traj.camera(0);
  io::write_rgbd(dir / "initial_rgb.png", dir / "initial_depth.png", synthetic::render_corridor(corridor, start));
  const auto controls = synthetic::corridor_controls(corridor);
  json polylines = json::array(), boxes = json::array();
  for (const auto& l : controls.polylines) polylines.push_back(io::to_json(l));
  for (const auto& b : controls.boxes) boxes.push_back(io::to_json(b));
  io::write_json(dir / "scene.json", json{{"rgb", "initial_rgb.png"},
                                          {"depth", "initial_depth.png"},
                                          {"camera", io::to_json(start)},
                                          {"max_depth", kDefaultMaxDepth},
                                          {"controls", {{"polylines", polylines}, {"boxes", boxes}}}});
  io::write_json(dir / "trajectory.json", io::to_json(traj));
  io::write_json(dir / "camera.json", io::to_json(start));
  io::write_json(dir / "map.json", polylines);
  io::write_json(dir / "boxes.json", boxes);
  out << json{{"output", a.out}, {"poses", traj.size()}}.dump() << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"scapegeom: geometry, consistency and sampling tools for RGB-D scene generation"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  std::function<int()> action;

  BackprojectArgs bp;
  auto* c_bp = app.add_subcommand("backproject", "Back-project an RGB-D image into a world-frame PLY cloud");
  c_bp->add_option("--rgb", bp.rgb, "8-bit RGB PNG")->required();
  c_bp->add_option("--depth", bp.depth, "16-bit depth PNG")->required();
  c_bp->add_option("--camera", bp.camera, "camera JSON")->required();
  c_bp->add_option("--out", bp.out, "output PLY")->required();
  c_bp->add_option("--max-depth", bp.max_depth, "depth codec range (m)");
  c_bp->add_option("--source-index", bp.source_index);
  c_bp->callback([&] { action = [&] { return cmd_backproject(bp, out); }; });

  RenderArgs rd;
  auto* c_rd = app.add_subcommand("render", "Z-buffer render a PLY cloud at a camera");
  c_rd->add_option("--cloud", rd.cloud, "input PLY")->required();
  c_rd->add_option("--camera", rd.camera, "camera JSON")->required();
  c_rd->add_option("--out-dir", rd.out_dir, "writes rgb.png, depth.png, mask.png")->required();
  c_rd->add_option("--splat-radius", rd.splat_radius)->check(CLI::NonNegativeNumber);
  c_rd->add_option("--max-depth", rd.max_depth);
  c_rd->callback([&] { action = [&] { return cmd_render(rd, out); }; });

  LossArgs ls;
  auto* c_ls = app.add_subcommand("loss", "Trimmed masked warp-consistency loss between two RGB-D images");
  c_ls->add_option("--rgb-a", ls.rgb_a)->required();
  c_ls->add_option("--depth-a", ls.depth_a)->required();
  c_ls->add_option("--rgb-b", ls.rgb_b)->required();
  c_ls->add_option("--depth-b", ls.depth_b)->required();
  c_ls->add_option("--mask", ls.mask)->required();
  c_ls->add_option("--trim", ls.trim, "fraction of largest residuals dropped");
  c_ls->add_option("--depth-weight", ls.depth_weight);
  c_ls->add_option("--max-depth", ls.max_depth);
  c_ls->callback([&] { action = [&] { return cmd_loss(ls, out); }; });

  FilterArgs fl;
  auto* c_fl = app.add_subcommand("filter", "Drop the most inconsistent samples by loss");
  c_fl->add_option("--losses", fl.losses, "JSON array of losses")->required();
  c_fl->add_option("--drop", fl.drop, "fraction dropped");
  c_fl->callback([&] { action = [&] { return cmd_filter(fl, out); }; });

  SelectArgs sk;
  auto* c_sk = app.add_subcommand("select-keyframes", "Select keyframe indices along a trajectory");
  c_sk->add_option("--trajectory", sk.trajectory, "trajectory JSON")->required();
  c_sk->add_option("--beta", sk.beta, "distance threshold (m)");
  c_sk->add_option("--gamma", sk.gamma, "view-angle threshold (deg)");
  c_sk->callback([&] { action = [&] { return cmd_select(sk, out); }; });

  PipelineArgs pl;
  auto* c_pl = app.add_subcommand("pipeline", "Run the autoregressive keyframe loop with a stub generator");
  c_pl->add_option("--scene", pl.scene, "scene JSON (initial rgb/depth paths, camera, optional controls)")->required();
  c_pl->add_option("--trajectory", pl.trajectory, "trajectory JSON")->required();
  c_pl->add_option("--out", pl.out, "output directory")->required();
  c_pl->add_option("--generator", pl.generator)->check(CLI::IsMember({"copy", "noisy", "diffusion"}));
  c_pl->add_option("--seed", pl.seed, "required for noisy/diffusion generators");
  c_pl->add_option("--beta", pl.beta);
  c_pl->add_option("--gamma", pl.gamma);
  c_pl->add_option("--trim", pl.trim);
  c_pl->add_option("--depth-weight", pl.depth_weight);
  c_pl->add_option("--splat-radius", pl.splat_radius)->check(CLI::NonNegativeNumber);
  c_pl->add_option("--guidance-w", pl.w, "guidance scale for the diffusion generator");
  c_pl->add_option("--steps", pl.steps, "diffusion steps for the diffusion generator");
  c_pl->callback([&] {
    if (pl.generator != "copy" && !pl.seed) throw UsageError("--seed is required for generator '" + pl.generator + "'");
    action = [&] { return cmd_pipeline(pl, out); };
  });

  RasterizeArgs rs;
  auto* c_rs = app.add_subcommand("rasterize", "Rasterize map polylines and boxes into control images");
  c_rs->add_option("--camera", rs.camera, "camera JSON")->required();
  c_rs->add_option("--map", rs.map, "polylines JSON");
  c_rs->add_option("--boxes", rs.boxes, "boxes JSON");
  c_rs->add_option("--out-dir", rs.out_dir)->required();
  c_rs->add_option("--mask", rs.mask, "visibility mask PNG to downsample");
  c_rs->add_option("--downsample", rs.downsample, "mask downsampling factor")->needs("--mask");
  c_rs->callback([&] {
    if (!rs.mask.empty() && rs.downsample < 1) throw UsageError("--mask needs --downsample >= 1");
    action = [&] { return cmd_rasterize(rs, out); };
  });

  InterpolateArgs ip;
  auto* c_ip = app.add_subcommand("interpolate", "Render interpolation conditions between two keyframes");
  c_ip->add_option("--kf1", ip.kf1, "keyframe directory (rgb.png, depth.png, camera.json)")->required();
  c_ip->add_option("--kf2", ip.kf2, "keyframe directory")->required();
  c_ip->add_option("--trajectory", ip.trajectory, "trajectory JSON of intermediate poses")->required();
  c_ip->add_option("--out", ip.out)->required();
  c_ip->add_option("--max-depth", ip.max_depth);
  c_ip->add_option("--splat-radius", ip.splat_radius)->check(CLI::NonNegativeNumber);
  c_ip->callback([&] { action = [&] { return cmd_interpolate(ip, out); }; });

  SampleArgs sp;
  auto* c_sp = app.add_subcommand("sample", "Ancestral sampling with the analytic Gaussian denoiser");
  c_sp->add_option("--steps,-T", sp.steps, "number of diffusion steps")->check(CLI::PositiveNumber);
  c_sp->add_option("--w", sp.w, "warp-consistent guidance scale")->check(CLI::NonNegativeNumber);
  c_sp->add_option("--seed", sp.seed)->required();
  c_sp->add_option("--beta-start", sp.beta_start);
  c_sp->add_option("--beta-end", sp.beta_end);
  c_sp->add_option("--mu", sp.mu, "oracle data mean");
  c_sp->add_option("--sigma", sp.sigma, "oracle data std")->check(CLI::PositiveNumber);
  c_sp->add_option("--num-samples", sp.num_samples);
  c_sp->add_option("--dim", sp.dim, "sample dimension without a bundle");
  c_sp->add_option("--bundle", sp.bundle, "directory with rgb.png, depth.png, mask.png");
  c_sp->add_option("--target", sp.target, "constant guidance target for a 1-pixel bundle");
  c_sp->add_option("--trim", sp.trim);
  c_sp->add_option("--variance", sp.variance)->check(CLI::IsMember({"posterior", "forward"}));
  c_sp->add_flag("--summary-only", sp.summary_only, "omit individual samples");
  c_sp->callback([&] { action = [&] { return cmd_sample(sp, out); }; });

  DemoArgs dm;
  auto* c_dm = app.add_subcommand("demo-scene", "Write a synthetic corridor scene, trajectory and controls");
  c_dm->add_option("--out", dm.out)->required();
  c_dm->add_option("--width", dm.width)->check(CLI::PositiveNumber);
  c_dm->add_option("--height", dm.height)->check(CLI::PositiveNumber);
  c_dm->add_option("--poses", dm.poses)->check(CLI::PositiveNumber);
  c_dm->callback([&] { action = [&] { return cmd_demo(dm, out); }; });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    return action ? action() : kExitUsage;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomainError;
  }
}

}  // namespace scapegeom::cli
