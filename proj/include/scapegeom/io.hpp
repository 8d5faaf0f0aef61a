#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "scapegeom/conditioning.hpp"
#include "scapegeom/core_types.hpp"
#include "scapegeom/depth_codec.hpp"
#include "scapegeom/keyframe_pipeline.hpp"

namespace scapegeom::io {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---- JSON --------------------------------------------------------------------------------------
// Camera: {"intrinsics": {fx, fy, cx, cy, width, height},
//          "pose": {"rotation": [9, row-major], "translation": [3]}}
// Trajectory: {"intrinsics": {...}, "poses": [{"rotation": [...], "translation": [...]}, ...]}

json to_json(const CameraIntrinsics& k);
json to_json(const Pose& pose);
json to_json(const Camera& camera);
json to_json(const Trajectory& traj);
json to_json(const conditioning::MapPolyline& line);
json to_json(const conditioning::ObjectBox& box);

CameraIntrinsics intrinsics_from_json(const json& j);
Pose pose_from_json(const json& j);
Camera camera_from_json(const json& j);
Trajectory trajectory_from_json(const json& j);
conditioning::MapPolyline polyline_from_json(const json& j);
conditioning::ObjectBox box_from_json(const json& j);
/// Accepts an array of polylines/boxes or an object with a "polylines"/"boxes" array.
std::vector<conditioning::MapPolyline> polylines_from_json(const json& j);
std::vector<conditioning::ObjectBox> boxes_from_json(const json& j);

json read_json(const fs::path& path);
void write_json(const fs::path& path, const json& j);

// ---- PLY ---------------------------------------------------------------------------------------
// binary_little_endian 1.0; vertex: float x, y, z; uchar red, green, blue (round(color * 255)).

void write_ply(const fs::path& path, const PointCloud& cloud);
/// source_index of every point is set to 0.
PointCloud read_ply(const fs::path& path);

// ---- PNG ---------------------------------------------------------------------------------------

/// Colors are written as round(c * 255), read back as code / 255.
void write_rgb_png(const fs::path& path, int width, int height, std::span<const double> rgb);
std::vector<double> read_rgb_png(const fs::path& path, int& width, int& height);
/// 16-bit grayscale, value = encode_depth16.
void write_depth_png(const fs::path& path, int width, int height, std::span<const double> depth,
                     const depth::DepthCodecConfig& codec = {});
std::vector<double> read_depth_png(const fs::path& path, int& width, int& height,
                                   const depth::DepthCodecConfig& codec = {});
/// 8-bit grayscale, 0 or 255.
void write_mask_png(const fs::path& path, const VisibilityMask& mask);
VisibilityMask read_mask_png(const fs::path& path);

void write_color_png(const fs::path& path, const conditioning::ColorImage& image);
RgbdImage read_rgbd(const fs::path& rgb_path, const fs::path& depth_path, const depth::DepthCodecConfig& codec = {});
void write_rgbd(const fs::path& rgb_path, const fs::path& depth_path, const RgbdImage& image,
                const depth::DepthCodecConfig& codec = {});

// ---- Scenes ------------------------------------------------------------------------------------
// <dir>/manifest.json, <dir>/cloud.ply, and per keyframe <dir>/keyframes/kf_NNN/ holding
// rgb.png, depth.png, mask.png, render_rgb.png, render_depth.png, camera.json.

void write_scene(const fs::path& dir, const pipeline::SceneState& scene, const depth::DepthCodecConfig& codec = {});
/// Throws MissingFile (naming the path) or CorruptManifest.
pipeline::SceneState read_scene(const fs::path& dir);

}  // namespace scapegeom::io
