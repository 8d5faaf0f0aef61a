#pragma once

#include <span>
#include <vector>

#include "scapegeom/core_types.hpp"
#include "scapegeom/projection.hpp"

namespace scapegeom::interpolation {

struct Keyframe {
  RgbdImage image;
  Camera camera;
};

struct InterpolationRequest {
  Keyframe first;
  Keyframe second;
  std::vector<Camera> cameras;  // intermediate viewpoints, in trajectory order
};

Status validate(const InterpolationRequest& req);

/// Intermediate cameras are the trajectory poses strictly between the two keyframe indices.
InterpolationRequest request_from_trajectory(const Keyframe& first, const Keyframe& second, const Trajectory& traj,
                                             size_t first_index, size_t second_index);

/// Renders the union of both keyframes' back-projections at every intermediate camera. Depth is
/// only used for z-buffering: the returned bundles carry rgb + mask and an all-zero depth channel.
std::vector<RenderBundle> render_interpolation_conditions(const InterpolationRequest& req,
                                                          const projection::RenderOptions& options = {});

/// Nearest-valid-pixel hole fill (Euclidean; ties by smaller row, then column). Pixels with
/// mask = 1 are returned untouched; an all-hole frame becomes gray 0.5.
RgbdImage refine_stub(const RenderBundle& bundle);
std::vector<RgbdImage> refine_stub(std::span<const RenderBundle> bundles);

}  // namespace scapegeom::interpolation
