#include "scapegeom/io.hpp"

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace scapegeom::io {

namespace {

[[noreturn]] void io_error(const std::string& msg) { throw Error(ErrorKind::kIoError, msg); }

void require_file(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorKind::kMissingFile, path.string());
}

std::array<double, 3> vec3_array(const Vec3& v) { return {v.x(), v.y(), v.z()}; }

Vec3 vec3_from(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw Error(ErrorKind::kOutOfRangeValue, std::string(what) + " needs 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

// Missing keys or wrong JSON types surface as CorruptManifest instead of a raw parser exception.
template <typename Fn>
auto schema_guard(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptManifest, std::string(what) + ": " + e.what());
  }
}

std::uint8_t to_u8(double c) { return static_cast<std::uint8_t>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0)); }

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Keeps libpng quiet on stderr; the message ends up in the thrown Error instead.
struct PngMessage {
  std::string text;
};

void png_error_quiet(png_structp png, png_const_charp msg) {
  if (auto* m = static_cast<PngMessage*>(png_get_error_ptr(png))) m->text = msg;
  png_longjmp(png, 1);
}

void png_warning_quiet(png_structp, png_const_charp) {}

// Writes rows of `channels` samples of `bit_depth` bits (8 or 16, host-order uint16 for 16).
void write_png(const fs::path& path, int width, int height, int channels, int bit_depth, const void* data) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) io_error("cannot open " + path.string() + " for writing");
  PngMessage message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_quiet, png_warning_quiet);
  if (!png) io_error("png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    io_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    io_error("libpng failed writing " + path.string() + ": " + message.text);
  }
  png_init_io(png, fp.get());
  const int color_type = channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY;
  png_set_IHDR(png, info, png_uint_32(width), png_uint_32(height), bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // PNG is big-endian; buffers are host (little-endian) order
  const size_t row_bytes = size_t(width) * channels * (bit_depth / 8);
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (int y = 0; y < height; ++y) png_write_row(png, const_cast<png_bytep>(bytes + size_t(y) * row_bytes));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngData {
  int width = 0;
  int height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::vector<unsigned char> bytes;
};

PngData read_png(const fs::path& path) {
  require_file(path);
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) io_error("cannot open " + path.string());
  PngMessage message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_quiet, png_warning_quiet);
  if (!png) io_error("png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    io_error("png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    io_error("libpng failed reading " + path.string() + ": " + message.text);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  PngData out;
  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && out.bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  if (out.bit_depth == 16) png_set_swap(png);
  if (out.bit_depth < 8) out.bit_depth = 8;
  png_read_update_info(png, info);
  out.channels = png_get_channels(png, info);
  const size_t row_bytes = png_get_rowbytes(png, info);
  out.bytes.resize(row_bytes * size_t(out.height));
  for (int y = 0; y < out.height; ++y) png_read_row(png, out.bytes.data() + size_t(y) * row_bytes, nullptr);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace

// ---- JSON --------------------------------------------------------------------------------------

json to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

json to_json(const Pose& pose) {
  json rot = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot.push_back(pose.rotation(r, c));
  return {{"rotation", rot}, {"translation", vec3_array(pose.translation)}};
}

json to_json(const Camera& camera) { return {{"intrinsics", to_json(camera.intrinsics)}, {"pose", to_json(camera.pose)}}; }

json to_json(const Trajectory& traj) {
  json poses = json::array();
  for (const auto& p : traj.poses) poses.push_back(to_json(p));
  return {{"intrinsics", to_json(traj.intrinsics)}, {"poses", poses}};
}

json to_json(const conditioning::MapPolyline& line) {
  json pts = json::array();
  for (const auto& p : line.points) pts.push_back(vec3_array(p));
  return {{"layer", conditioning::to_string(line.layer)}, {"points", pts}};
}

json to_json(const conditioning::ObjectBox& box) {
  return {{"category", conditioning::to_string(box.category)},
          {"center", vec3_array(box.center)},
          {"size", vec3_array(box.size)},
          {"yaw", box.yaw}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  CameraIntrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  validate(k).throw_if_error();
  return k;
}

Pose pose_from_json(const json& j) {
  const json& rot = j.at("rotation");
  if (!rot.is_array() || rot.size() != 9) throw Error(ErrorKind::kOutOfRangeValue, "rotation needs 9 numbers");
  Pose p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = rot[size_t(r * 3 + c)].get<double>();
  p.translation = vec3_from(j.at("translation"), "translation");
  validate(p).throw_if_error();
  return p;
}

Camera camera_from_json(const json& j) {
  return schema_guard("camera", [&] {
    return Camera{intrinsics_from_json(j.at("intrinsics")), pose_from_json(j.at("pose"))};
  });
}

Trajectory trajectory_from_json(const json& j) {
  return schema_guard("trajectory", [&] {
    Trajectory t;
    t.intrinsics = intrinsics_from_json(j.at("intrinsics"));
    for (const auto& p : j.at("poses")) t.poses.push_back(pose_from_json(p));
    validate(t).throw_if_error();
    return t;
  });
}

conditioning::MapPolyline polyline_from_json(const json& j) {
  conditioning::MapPolyline line;
  line.layer = conditioning::parse_layer(j.at("layer").get<std::string>());
  for (const auto& p : j.at("points")) line.points.push_back(vec3_from(p, "polyline point"));
  conditioning::validate(line).throw_if_error();
  return line;
}

conditioning::ObjectBox box_from_json(const json& j) {
  conditioning::ObjectBox box;
  box.category = conditioning::parse_category(j.at("category").get<std::string>());
  box.center = vec3_from(j.at("center"), "center");
  box.size = vec3_from(j.at("size"), "size");
  box.yaw = j.value("yaw", 0.0);
  conditioning::validate(box).throw_if_error();
  return box;
}

std::vector<conditioning::MapPolyline> polylines_from_json(const json& j) {
  return schema_guard("polylines", [&] {
    const json& arr = j.is_object() ? j.at("polylines") : j;
    std::vector<conditioning::MapPolyline> out;
    for (const auto& e : arr) out.push_back(polyline_from_json(e));
    return out;
  });
}

std::vector<conditioning::ObjectBox> boxes_from_json(const json& j) {
  return schema_guard("boxes", [&] {
    const json& arr = j.is_object() ? j.at("boxes") : j;
    std::vector<conditioning::ObjectBox> out;
    for (const auto& e : arr) out.push_back(box_from_json(e));
    return out;
  });
}

json read_json(const fs::path& path) {
  require_file(path);
  std::ifstream in(path);
  if (!in) io_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptManifest, path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) io_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

// ---- PLY ---------------------------------------------------------------------------------------

void write_ply(const fs::path& path, const PointCloud& cloud) {
  validate(cloud).throw_if_error();
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error("cannot open " + path.string() + " for writing");
  out << "ply\nformat binary_little_endian 1.0\nelement vertex " << cloud.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n";
  std::vector<char> buf(cloud.size() * 15);
  char* w = buf.data();
  for (size_t i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < 3; ++a) {
      const float f = static_cast<float>(cloud.positions[i][a]);
      std::memcpy(w, &f, 4);  // host is little-endian
      w += 4;
    }
    for (int a = 0; a < 3; ++a) *w++ = static_cast<char>(to_u8(cloud.colors[i][a]));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

PointCloud read_ply(const fs::path& path) {
  require_file(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) io_error("cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "ply") io_error(path.string() + ": not a PLY file");
  size_t count = 0;
  std::vector<std::string> props;
  bool binary_le = false, in_vertex = false;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok == "format") {
      std::string fmt;
      ls >> fmt;
      binary_le = fmt == "binary_little_endian";
    } else if (tok == "element") {
      std::string name;
      ls >> name;
      in_vertex = name == "vertex";
      if (in_vertex) ls >> count;
    } else if (tok == "property" && in_vertex) {
      std::string type, name;
      ls >> type >> name;
      props.push_back(type + " " + name);
    }
  }
  const std::vector<std::string> expected{"float x", "float y", "float z", "uchar red", "uchar green", "uchar blue"};
  if (!binary_le || props != expected)
    io_error(path.string() + ": expected binary_little_endian x,y,z float + red,green,blue uchar");
  std::vector<char> buf(count * 15);
  in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) io_error(path.string() + ": truncated vertex data");
  PointCloud cloud;
  cloud.positions.reserve(count);
  const char* r = buf.data();
  for (size_t i = 0; i < count; ++i) {
    float xyz[3];
    std::memcpy(xyz, r, 12);
    r += 12;
    const auto* c = reinterpret_cast<const unsigned char*>(r);
    r += 3;
    cloud.push_back(Vec3(xyz[0], xyz[1], xyz[2]), Vec3(c[0] / 255.0, c[1] / 255.0, c[2] / 255.0), 0);
  }
  return cloud;
}

// ---- PNG ---------------------------------------------------------------------------------------

void write_rgb_png(const fs::path& path, int width, int height, std::span<const double> rgb) {
  if (rgb.size() != size_t(width) * height * 3) throw Error(ErrorKind::kDimensionMismatch, "rgb buffer size");
  std::vector<std::uint8_t> bytes(rgb.size());
  for (size_t i = 0; i < rgb.size(); ++i) bytes[i] = to_u8(rgb[i]);
  write_png(path, width, height, 3, 8, bytes.data());
}

std::vector<double> read_rgb_png(const fs::path& path, int& width, int& height) {
  PngData d = read_png(path);
  if (d.bit_depth != 8 || (d.channels != 3 && d.channels != 1))
    io_error(path.string() + ": expected an 8-bit RGB image");
  width = d.width;
  height = d.height;
  std::vector<double> out(size_t(width) * height * 3);
  for (size_t p = 0; p < size_t(width) * height; ++p)
    for (int c = 0; c < 3; ++c) out[p * 3 + c] = d.bytes[p * d.channels + (d.channels == 3 ? c : 0)] / 255.0;
  return out;
}

void write_depth_png(const fs::path& path, int width, int height, std::span<const double> depth,
                     const depth::DepthCodecConfig& codec) {
  if (depth.size() != size_t(width) * height) throw Error(ErrorKind::kDimensionMismatch, "depth buffer size");
  const std::vector<std::uint16_t> codes = depth::encode_depth16(depth, codec);
  write_png(path, width, height, 1, 16, codes.data());
}

std::vector<double> read_depth_png(const fs::path& path, int& width, int& height, const depth::DepthCodecConfig& codec) {
  PngData d = read_png(path);
  if (d.bit_depth != 16 || d.channels != 1) io_error(path.string() + ": expected a 16-bit grayscale depth image");
  width = d.width;
  height = d.height;
  std::vector<std::uint16_t> codes(size_t(width) * height);
  std::memcpy(codes.data(), d.bytes.data(), codes.size() * 2);
  return depth::decode_depth16(codes, codec);
}

void write_mask_png(const fs::path& path, const VisibilityMask& mask) {
  std::vector<std::uint8_t> bytes(mask.mask.size());
  for (size_t i = 0; i < bytes.size(); ++i) bytes[i] = mask.mask[i] ? 255 : 0;
  write_png(path, mask.width, mask.height, 1, 8, bytes.data());
}

VisibilityMask read_mask_png(const fs::path& path) {
  PngData d = read_png(path);
  if (d.bit_depth != 8) io_error(path.string() + ": expected an 8-bit mask");
  VisibilityMask m(d.width, d.height);
  for (size_t p = 0; p < m.mask.size(); ++p) m.mask[p] = d.bytes[p * d.channels] >= 128 ? 1 : 0;
  return m;
}

void write_color_png(const fs::path& path, const conditioning::ColorImage& image) {
  write_rgb_png(path, image.width, image.height, image.rgb);
}

RgbdImage read_rgbd(const fs::path& rgb_path, const fs::path& depth_path, const depth::DepthCodecConfig& codec) {
  RgbdImage img;
  int dw = 0, dh = 0;
  img.rgb = read_rgb_png(rgb_path, img.width, img.height);
  img.depth = read_depth_png(depth_path, dw, dh, codec);
  if (dw != img.width || dh != img.height)
    throw Error(ErrorKind::kDimensionMismatch, rgb_path.string() + " and " + depth_path.string() + " differ in size");
  return img;
}

void write_rgbd(const fs::path& rgb_path, const fs::path& depth_path, const RgbdImage& image,
                const depth::DepthCodecConfig& codec) {
  write_rgb_png(rgb_path, image.width, image.height, image.rgb);
  write_depth_png(depth_path, image.width, image.height, image.depth, codec);
}

// ---- Scenes ------------------------------------------------------------------------------------

namespace {

std::string keyframe_dir(size_t i) {
  char name[32];
  std::snprintf(name, sizeof(name), "keyframes/kf_%03zu", i);
  return name;
}

}  // namespace

void write_scene(const fs::path& dir, const pipeline::SceneState& scene, const depth::DepthCodecConfig& codec) {
  fs::create_directories(dir);
  json kfs = json::array();
  for (size_t i = 0; i < scene.keyframes.size(); ++i) {
    const auto& kf = scene.keyframes[i];
    const std::string rel = keyframe_dir(i);
    fs::create_directories(dir / rel);
    write_rgbd(dir / rel / "rgb.png", dir / rel / "depth.png", kf.image, codec);
    write_mask_png(dir / rel / "mask.png", kf.bundle.mask);
    write_rgbd(dir / rel / "render_rgb.png", dir / rel / "render_depth.png", kf.bundle.image, codec);
    write_json(dir / rel / "camera.json", to_json(kf.camera));
    kfs.push_back({{"trajectory_index", kf.trajectory_index},
                   {"rgb", rel + "/rgb.png"},
                   {"depth", rel + "/depth.png"},
                   {"mask", rel + "/mask.png"},
                   {"render_rgb", rel + "/render_rgb.png"},
                   {"render_depth", rel + "/render_depth.png"},
                   {"camera", to_json(kf.camera)},
                   {"points", kf.points_added},
                   {"warp_loss", kf.warp_loss ? json(*kf.warp_loss) : json(nullptr)}});
  }
  write_ply(dir / "cloud.ply", scene.cloud);
  const json manifest{{"format", "scapegeom-scene"},
                      {"version", 1},
                      {"max_depth", codec.max_depth},
                      {"visit_order", scene.visit_order},
                      {"cloud", "cloud.ply"},
                      {"keyframes", kfs}};
  write_json(dir / "manifest.json", manifest);
}

pipeline::SceneState read_scene(const fs::path& dir) {
  const json m = read_json(dir / "manifest.json");
  pipeline::SceneState scene;
  try {
    if (m.at("format").get<std::string>() != "scapegeom-scene")
      throw Error(ErrorKind::kCorruptManifest, "unexpected format tag");
    depth::DepthCodecConfig codec{m.at("max_depth").get<double>()};
    depth::validate(codec).throw_if_error();
    scene.visit_order = m.at("visit_order").get<std::vector<size_t>>();

    std::vector<size_t> counts;
    for (const auto& e : m.at("keyframes")) {
      for (const char* key : {"rgb", "depth", "mask", "render_rgb", "render_depth"})
        require_file(dir / e.at(key).get<std::string>());
      pipeline::GeneratedKeyframe kf;
      kf.trajectory_index = e.at("trajectory_index").get<size_t>();
      kf.camera = camera_from_json(e.at("camera"));
      kf.image = read_rgbd(dir / e.at("rgb").get<std::string>(), dir / e.at("depth").get<std::string>(), codec);
      kf.bundle.image =
          read_rgbd(dir / e.at("render_rgb").get<std::string>(), dir / e.at("render_depth").get<std::string>(), codec);
      kf.bundle.mask = read_mask_png(dir / e.at("mask").get<std::string>());
      kf.points_added = e.at("points").get<size_t>();
      if (!e.at("warp_loss").is_null()) kf.warp_loss = e.at("warp_loss").get<double>();
      counts.push_back(kf.points_added);
      scene.keyframes.push_back(std::move(kf));
    }

    const fs::path cloud_path = dir / m.at("cloud").get<std::string>();
    scene.cloud = read_ply(cloud_path);
    size_t at = 0;
    for (size_t k = 0; k < counts.size(); ++k)
      for (size_t n = 0; n < counts[k]; ++n, ++at) {
        if (at >= scene.cloud.size()) throw Error(ErrorKind::kCorruptManifest, "point counts exceed cloud size");
        scene.cloud.source_index[at] = static_cast<int>(k);
      }
    if (at != scene.cloud.size()) throw Error(ErrorKind::kCorruptManifest, "point counts do not sum to cloud size");
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kCorruptManifest, (dir / "manifest.json").string() + ": " + e.what());
  }
  return scene;
}

}  // namespace scapegeom::io
