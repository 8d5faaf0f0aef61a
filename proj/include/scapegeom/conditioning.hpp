#pragma once

#include <array>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "scapegeom/core_types.hpp"

namespace scapegeom::conditioning {

// World frame matches a level reference camera: x right, y down, z forward.

enum class MapLayer { kLaneBoundary, kLaneDivider, kPedestrianCrossing };
enum class ObjectCategory { kVehicle, kPedestrian, kRoadblock, kOther };

struct MapPolyline {
  std::vector<Vec3> points;  // world meters, at least two
  MapLayer layer = MapLayer::kLaneBoundary;
};

/// Oriented 3D box. size = (length along the heading, width, height). yaw rotates about the
/// world y axis; yaw 0 points the box's front along +z.
struct ObjectBox {
  Vec3 center = Vec3::Zero();
  Vec3 size = Vec3::Ones();
  double yaw = 0.0;
  ObjectCategory category = ObjectCategory::kVehicle;
};

/// H×W×3 color raster in [0,1], black background.
struct ColorImage {
  int width = 0;
  int height = 0;
  std::vector<double> rgb;

  ColorImage() = default;
  ColorImage(int w, int h) : width(w), height(h), rgb(size_t(w) * h * 3, 0.0) {}

  Vec3 at(int u, int v) const;
  void set(int u, int v, const Vec3& c);
  bool operator==(const ColorImage&) const = default;
};

struct ControlImages {
  ColorImage map_image;
  ColorImage semantic_box_image;
  ColorImage orientation_box_image;
};

struct SceneControls {
  std::vector<MapPolyline> polylines;
  std::vector<ObjectBox> boxes;
};

Status validate(const MapPolyline& line);
Status validate(const ObjectBox& box);

std::string_view to_string(MapLayer layer);
std::string_view to_string(ObjectCategory category);
MapLayer parse_layer(std::string_view name);
ObjectCategory parse_category(std::string_view name);

/// lane_boundary red, lane_divider green, pedestrian_crossing blue.
Vec3 layer_color(MapLayer layer);
/// vehicle (0, 0.6, 1), pedestrian (1, 0.2, 0.6), roadblock (1, 0.8, 0), other (0.6, 0.6, 0.6).
Vec3 category_color(ObjectCategory category);

/// Corner order: bottom face 0 front-left, 1 front-right, 2 rear-right, 3 rear-left; top face 4..7
/// in the same order. "Bottom" is +y (down).
std::array<Vec3, 8> box_corners(const ObjectBox& box);

/// Edges 0-3 bottom face, 4-7 top face, 8-11 verticals; edge 0 is the bottom front edge.
inline constexpr std::array<std::pair<int, int>, 12> kBoxEdges{{
    {0, 1}, {1, 2}, {2, 3}, {3, 0},
    {4, 5}, {5, 6}, {6, 7}, {7, 4},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

/// One fixed color per edge index, shared by every box.
const std::array<Vec3, 12>& orientation_palette();

/// Pixels of the 1-px DDA line between two continuous pixel positions (row/column order not
/// guaranteed). Every pixel lies within 1 px of the segment.
std::vector<std::pair<int, int>> line_pixels(double u0, double v0, double u1, double v1);

/// Clips a world segment at z_near in camera space, projects, and paints it.
void draw_segment(ColorImage& image, const Camera& camera, const Vec3& a, const Vec3& b, const Vec3& color);

ColorImage rasterize_map(std::span<const MapPolyline> polylines, const Camera& camera);
/// Boxes drawn far-to-near by camera-frame center depth, so nearer boxes overdraw.
ColorImage rasterize_boxes_semantic(std::span<const ObjectBox> boxes, const Camera& camera);
ColorImage rasterize_boxes_orientation(std::span<const ObjectBox> boxes, const Camera& camera);
ControlImages rasterize_controls(const SceneControls& controls, const Camera& camera);

/// Block majority rule: output 1 iff at least half of the factor×factor block is 1.
VisibilityMask downsample_mask(const VisibilityMask& mask, int factor);

}  // namespace scapegeom::conditioning
