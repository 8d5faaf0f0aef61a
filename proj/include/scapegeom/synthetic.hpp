#pragma once

#include "scapegeom/conditioning.hpp"
#include "scapegeom/core_types.hpp"

namespace scapegeom::synthetic {

/// Axis-aligned box-shaped corridor seen from inside: walls at x = ±half_width, floor at
/// y = floor_y, ceiling at y = ceiling_y, end wall at z = far_z (world frame, y down).
struct Corridor {
  double half_width = 3.0;
  double floor_y = 1.6;
  double ceiling_y = -2.4;
  double far_z = 60.0;
};

/// Ray-cast RGB-D view of the corridor. Colors are multiples of 1/255.
RgbdImage render_corridor(const Corridor& corridor, const Camera& camera);

/// n poses spaced `spacing` meters apart along +z, identity rotation.
Trajectory straight_trajectory(const CameraIntrinsics& k, size_t n, double spacing);

/// n poses at the origin, yawing by step_deg per pose.
Trajectory yaw_trajectory(const CameraIntrinsics& k, size_t n, double step_deg);

/// Lane lines on the corridor floor plus a couple of boxes, for control-image demos.
conditioning::SceneControls corridor_controls(const Corridor& corridor);

}  // namespace scapegeom::synthetic
