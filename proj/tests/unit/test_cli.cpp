#include "doctest.h"

#include <sstream>

#include "scapegeom/cli.hpp"
#include "scapegeom/io.hpp"
#include "test_util.hpp"

using namespace scapegeom;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "scapegeom_cli");
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

io::json parse(const Result& r) { return io::json::parse(r.out); }

fs::path demo() {
  static const fs::path dir = [] {
    const fs::path d = testing::temp_dir("cli_demo");
    REQUIRE(run({"demo-scene", "--out", d.string(), "--width", "32", "--height", "24"}).code == 0);
    return d;
  }();
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"no-such-command"}).code == cli::kExitUsage);
  const Result r = run({"select-keyframes", "--beta", "10"});
  CHECK(r.code == cli::kExitUsage);
  CHECK(r.err.find("--trajectory") != std::string::npos);
  CHECK(run({"sample", "--steps", "10"}).code == cli::kExitUsage);  // --seed missing
  CHECK(run({"select-keyframes", "--trajectory", "t.json", "--beta", "ten"}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
}

TEST_CASE("select-keyframes on the 31-pose line") {
  const Result r = run({"select-keyframes", "--beta", "10", "--gamma", "20", "--trajectory",
                        (demo() / "trajectory.json").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "[0,10,20,30]\n");
}

TEST_CASE("domain errors exit 1") {
  const Result r = run({"select-keyframes", "--trajectory", "/definitely/missing.json"});
  CHECK(r.code == cli::kExitDomainError);
  CHECK(r.err.find("MissingFile") != std::string::npos);
}

TEST_CASE("backproject, render and loss") {
  const fs::path d = demo();
  const fs::path work = testing::temp_dir("cli_render");
  const std::string rgb = (d / "initial_rgb.png").string(), depth = (d / "initial_depth.png").string();
  REQUIRE(run({"backproject", "--rgb", rgb, "--depth", depth, "--camera", (d / "camera.json").string(), "--out",
               (work / "c.ply").string()})
              .code == 0);
  const Result r = run({"render", "--cloud", (work / "c.ply").string(), "--camera", (d / "camera.json").string(),
                        "--out-dir", work.string()});
  REQUIRE(r.code == 0);
  CHECK(parse(r).at("visible_pixels") == 32 * 24);

  const Result same = run({"loss", "--rgb-a", rgb, "--depth-a", depth, "--rgb-b", rgb, "--depth-b", depth, "--mask",
                           (work / "mask.png").string()});
  REQUIRE(same.code == 0);
  CHECK(parse(same).at("loss") == 0.0);
  CHECK(parse(same).at("kept_pixels").get<int>() + parse(same).at("trimmed_pixels").get<int>() == 32 * 24);

  // Rendered image vs original: float32 PLY positions and 8-bit colors keep it tiny but valid.
  const Result rl = run({"loss", "--rgb-a", rgb, "--depth-a", depth, "--rgb-b", (work / "rgb.png").string(),
                         "--depth-b", (work / "depth.png").string(), "--mask", (work / "mask.png").string(),
                         "--trim", "0"});
  REQUIRE(rl.code == 0);
  CHECK(parse(rl).at("loss").get<double>() < 1e-8);
}

TEST_CASE("filter") {
  const fs::path work = testing::temp_dir("cli_filter");
  io::write_json(work / "l.json", io::json{0.1, 0.5, 0.2, 0.9});
  const Result r = run({"filter", "--losses", (work / "l.json").string(), "--drop", "0.25"});
  REQUIRE(r.code == 0);
  CHECK(parse(r).at("kept") == io::json{0, 1, 2});
  CHECK(parse(r).at("dropped") == io::json{3});
}

TEST_CASE("pipeline") {
  const fs::path d = demo();
  const fs::path out = testing::temp_dir("cli_pipeline");
  const std::vector<std::string> base{"pipeline", "--scene", (d / "scene.json").string(), "--trajectory",
                                      (d / "trajectory.json").string(), "--out", out.string(), "--trim", "0"};
  const Result r = run(base);
  REQUIRE(r.code == 0);
  const auto j = parse(r);
  CHECK(j.at("visit_order") == io::json{0, 30, 20, 10});
  CHECK(j.at("warp_losses") == io::json{nullptr, 0.0, 0.0, 0.0});
  CHECK(fs::exists(out / "manifest.json"));
  CHECK(fs::exists(out / "cloud.ply"));
  CHECK(fs::exists(out / "keyframes/kf_003/rgb.png"));
  CHECK(fs::exists(out / "keyframes/kf_001/control_map.png"));

  auto noisy = base;
  noisy.insert(noisy.end(), {"--generator", "noisy"});
  CHECK(run(noisy).code == cli::kExitUsage);
  noisy.insert(noisy.end(), {"--seed", "5"});
  const Result n1 = run(noisy);
  const Result n2 = run(noisy);
  REQUIRE(n1.code == 0);
  CHECK(n1.out == n2.out);
}

TEST_CASE("rasterize") {
  const fs::path d = demo();
  const fs::path out = testing::temp_dir("cli_rasterize");
  const Result r = run({"rasterize", "--camera", (d / "camera.json").string(), "--map", (d / "map.json").string(),
                        "--boxes", (d / "boxes.json").string(), "--out-dir", out.string()});
  REQUIRE(r.code == 0);
  for (const char* f : {"map.png", "semantic_boxes.png", "orientation_boxes.png"}) CHECK(fs::exists(out / f));
  VisibilityMask m(32, 24, 1);
  io::write_mask_png(out / "m.png", m);
  const Result ds = run({"rasterize", "--camera", (d / "camera.json").string(), "--out-dir", out.string(), "--mask",
                         (out / "m.png").string(), "--downsample", "8"});
  REQUIRE(ds.code == 0);
  CHECK(parse(ds).at("mask_latent") == io::json{4, 3});
  const Result bad = run({"rasterize", "--camera", (d / "camera.json").string(), "--out-dir", out.string(), "--mask",
                          (out / "m.png").string(), "--downsample", "5"});
  CHECK(bad.code == cli::kExitDomainError);
  CHECK(bad.err.find("NonDivisibleFactor") != std::string::npos);
}

TEST_CASE("interpolate") {
  const fs::path d = demo();
  const fs::path work = testing::temp_dir("cli_interp");
  const Trajectory t = io::trajectory_from_json(io::read_json(d / "trajectory.json"));
  // Both keyframes from the pipeline output.
  const fs::path scene = work / "scene";
  REQUIRE(run({"pipeline", "--scene", (d / "scene.json").string(), "--trajectory", (d / "trajectory.json").string(),
               "--out", scene.string()})
              .code == 0);
  Trajectory slice{t.intrinsics, {t.poses.begin() + 1, t.poses.begin() + 10}};
  io::write_json(work / "slice.json", io::to_json(slice));
  const Result r = run({"interpolate", "--kf1", (scene / "keyframes/kf_000").string(), "--kf2",
                        (scene / "keyframes/kf_003").string(), "--trajectory", (work / "slice.json").string(), "--out",
                        (work / "frames").string()});
  REQUIRE(r.code == 0);
  CHECK(parse(r).at("frames") == 9);
  CHECK(fs::exists(work / "frames/frame_008_rgb.png"));
  CHECK(io::read_json(work / "frames/manifest.json").at("frames").size() == 9);
}

TEST_CASE("sample") {
  const Result a = run({"sample", "--steps", "10", "--seed", "3", "--num-samples", "5", "--dim", "2"});
  const Result b = run({"sample", "--steps", "10", "--seed", "3", "--num-samples", "5", "--dim", "2"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(parse(a).at("samples").size() == 5);
  const Result s = run({"sample", "--steps", "10", "--seed", "3", "--num-samples", "50", "--target", "0.5", "--w",
                        "2", "--summary-only"});
  REQUIRE(s.code == 0);
  CHECK_FALSE(parse(s).contains("samples"));
  CHECK(parse(s).at("mean").size() == 4);
  CHECK(run({"sample", "--seed", "1", "--w", "1"}).code == cli::kExitUsage);
  CHECK(run({"sample", "--seed", "1", "--variance", "odd"}).code == cli::kExitUsage);
}
