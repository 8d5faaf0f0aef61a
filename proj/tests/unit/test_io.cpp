#include "doctest.h"

#include <cmath>
#include <fstream>

#include "scapegeom/io.hpp"
#include "scapegeom/synthetic.hpp"
#include "test_util.hpp"

using namespace scapegeom;
namespace fs = std::filesystem;

namespace {

void expect_kind(ErrorKind kind, auto&& fn) {
  try {
    fn();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == kind);
  }
}

pipeline::SceneState two_keyframe_scene() {
  const Trajectory t = synthetic::straight_trajectory(testing::intrinsics(24, 16, 12.0), 11, 1.0);
  const RgbdImage initial = synthetic::render_corridor({}, t.camera(0));
  pipeline::CopyThroughGenerator gen;
  return pipeline::generate_scene(initial, t.camera(0), t, std::vector<size_t>{0, 10}, gen);
}

}  // namespace

TEST_CASE("camera and trajectory json") {
  std::mt19937_64 rng(1);
  const Camera c{testing::intrinsics(20, 10), testing::random_pose(rng)};
  CHECK(io::camera_from_json(io::to_json(c)) == c);
  const io::json j = io::to_json(c);
  CHECK(j.at("pose").at("rotation").size() == 9);
  CHECK(j.at("intrinsics").at("width") == 20);

  Trajectory t = synthetic::yaw_trajectory(testing::intrinsics(8, 8), 4, 5.0);
  const Trajectory back = io::trajectory_from_json(io::to_json(t));
  CHECK(back.intrinsics == t.intrinsics);
  CHECK(back.poses == t.poses);
  // A bare array of poses is not a trajectory; intrinsics are required.
  expect_kind(ErrorKind::kCorruptManifest, [&] { io::trajectory_from_json(io::json::array()); });
  expect_kind(ErrorKind::kCorruptManifest, [&] { io::camera_from_json(io::json{{"pose", 3}}); });
}

TEST_CASE("invalid camera json is rejected") {
  io::json j = io::to_json(Camera{testing::intrinsics(4, 4), Pose::Identity()});
  j["pose"]["rotation"][0] = 2.0;
  CHECK_THROWS_AS(io::camera_from_json(j), Error);
}

TEST_CASE("controls json") {
  const auto ctl = synthetic::corridor_controls({});
  io::json lines = io::json::array(), boxes = io::json::array();
  for (const auto& l : ctl.polylines) lines.push_back(io::to_json(l));
  for (const auto& b : ctl.boxes) boxes.push_back(io::to_json(b));
  const auto lb = io::polylines_from_json(lines);
  REQUIRE(lb.size() == ctl.polylines.size());
  CHECK(lb[0].points == ctl.polylines[0].points);
  CHECK(lb[0].layer == ctl.polylines[0].layer);
  const auto bb = io::boxes_from_json(io::json{{"boxes", boxes}});
  REQUIRE(bb.size() == ctl.boxes.size());
  CHECK(bb[0].center == ctl.boxes[0].center);
  CHECK(bb[0].category == ctl.boxes[0].category);
  CHECK(lines[0].contains("layer"));
  CHECK(boxes[0].contains("yaw"));
}

TEST_CASE("ply round trip") {
  const fs::path dir = testing::temp_dir("ply");
  PointCloud c;
  c.push_back(Vec3(1.5, -2.25, 3.0), Vec3(1, 0, 128 / 255.0), 4);
  c.push_back(Vec3(0.1, 0.2, 0.3), Vec3(0.2, 0.4, 0.6), 4);
  io::write_ply(dir / "c.ply", c);
  const PointCloud r = io::read_ply(dir / "c.ply");
  REQUIRE(r.size() == 2);
  CHECK(r.positions[0] == c.positions[0]);
  CHECK((r.positions[1] - c.positions[1]).norm() < 1e-6);
  CHECK(r.colors[0] == c.colors[0]);
  CHECK(r.colors[1] == Vec3(51 / 255.0, 102 / 255.0, 153 / 255.0));
  CHECK(r.source_index == std::vector<int>{0, 0});
  // Header is ascii and binary little endian.
  std::ifstream in(dir / "c.ply", std::ios::binary);
  std::string line;
  std::getline(in, line);
  CHECK(line == "ply");
  std::getline(in, line);
  CHECK(line == "format binary_little_endian 1.0");
  const auto size = fs::file_size(dir / "c.ply");
  CHECK(size > 2 * 15);
  expect_kind(ErrorKind::kMissingFile, [&] { io::read_ply(dir / "none.ply"); });
  std::ofstream(dir / "bad.ply") << "not a ply\n";
  CHECK_THROWS_AS(io::read_ply(dir / "bad.ply"), Error);
}

TEST_CASE("png round trips") {
  const fs::path dir = testing::temp_dir("png");
  std::mt19937_64 rng(3);
  const RgbdImage img = testing::random_image(rng, 17, 9, 0.5, 299.0, 0.1);
  io::write_rgbd(dir / "rgb.png", dir / "depth.png", img);
  const RgbdImage back = io::read_rgbd(dir / "rgb.png", dir / "depth.png");
  CHECK(back.rgb == img.rgb);
  for (size_t i = 0; i < img.depth.size(); ++i) CHECK(std::abs(back.depth[i] - img.depth[i]) <= 300.0 / 65536);

  // Stored depth codes are exactly encode_depth16.
  int w = 0, h = 0;
  const auto d = io::read_depth_png(dir / "depth.png", w, h);
  CHECK(w == 17);
  CHECK(h == 9);
  CHECK(d == back.depth);

  VisibilityMask m(5, 3);
  m.mask[2] = m.mask[14] = 1;
  io::write_mask_png(dir / "mask.png", m);
  CHECK(io::read_mask_png(dir / "mask.png") == m);

  expect_kind(ErrorKind::kMissingFile, [&] { io::read_mask_png(dir / "nope.png"); });
  std::ofstream(dir / "junk.png") << "junk";
  expect_kind(ErrorKind::kIoError, [&] { io::read_mask_png(dir / "junk.png"); });
  io::write_rgbd(dir / "small_rgb.png", dir / "small_depth.png", RgbdImage(3, 3));
  expect_kind(ErrorKind::kDimensionMismatch, [&] { io::read_rgbd(dir / "rgb.png", dir / "small_depth.png"); });
}

TEST_CASE("scene round trip") {
  const fs::path dir = testing::temp_dir("scene");
  const auto scene = two_keyframe_scene();
  REQUIRE(scene.keyframes.size() == 2);
  io::write_scene(dir, scene);
  const auto back = io::read_scene(dir);
  CHECK(back.visit_order == scene.visit_order);
  REQUIRE(back.keyframes.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    const auto& a = scene.keyframes[i];
    const auto& b = back.keyframes[i];
    CHECK(b.trajectory_index == a.trajectory_index);
    CHECK(b.camera == a.camera);
    CHECK(b.image.rgb == a.image.rgb);
    for (size_t p = 0; p < a.image.depth.size(); ++p) CHECK(std::abs(b.image.depth[p] - a.image.depth[p]) <= 300.0 / 65536);
    CHECK(b.bundle.mask == a.bundle.mask);
    CHECK(b.points_added == a.points_added);
    CHECK(b.warp_loss == a.warp_loss);
  }
  REQUIRE(back.cloud.size() == scene.cloud.size());
  CHECK(back.cloud.source_index == scene.cloud.source_index);
  for (size_t i = 0; i < scene.cloud.size(); ++i)
    CHECK((back.cloud.positions[i] - scene.cloud.positions[i]).norm() <= 1e-5 * (1 + scene.cloud.positions[i].norm()));
}

TEST_CASE("empty scene") {
  const fs::path dir = testing::temp_dir("empty_scene");
  io::write_scene(dir, pipeline::SceneState{});
  const auto back = io::read_scene(dir);
  CHECK(back.keyframes.empty());
  CHECK(back.cloud.empty());
  CHECK(io::read_json(dir / "manifest.json").at("keyframes").empty());
}

TEST_CASE("missing and corrupt scene files") {
  const fs::path dir = testing::temp_dir("broken_scene");
  io::write_scene(dir, two_keyframe_scene());
  fs::remove(dir / "keyframes/kf_001/depth.png");
  try {
    io::read_scene(dir);
    FAIL("expected MissingFile");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingFile);
    CHECK(std::string(e.what()).find("kf_001/depth.png") != std::string::npos);
  }
  expect_kind(ErrorKind::kMissingFile, [&] { io::read_scene(dir / "nowhere"); });
  std::ofstream(dir / "manifest.json") << "{ not json";
  expect_kind(ErrorKind::kCorruptManifest, [&] { io::read_scene(dir); });
  std::ofstream(dir / "manifest.json") << R"({"format": "other"})";
  expect_kind(ErrorKind::kCorruptManifest, [&] { io::read_scene(dir); });
}
