#include "scapegeom/interpolation.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <tuple>

#include "scapegeom/parallel.hpp"

namespace scapegeom::interpolation {

Status validate(const InterpolationRequest& req) {
  if (req.cameras.empty()) return Status::Fail(ErrorKind::kOutOfRangeValue, "need at least one intermediate camera");
  for (const Keyframe* kf : {&req.first, &req.second}) {
    if (auto s = validate(kf->camera); !s) return s;
    if (auto s = check_dims(kf->image, kf->camera.intrinsics); !s) return s;
  }
  for (const Camera& c : req.cameras)
    if (auto s = validate(c); !s) return s;
  return Status::Ok();
}

InterpolationRequest request_from_trajectory(const Keyframe& first, const Keyframe& second, const Trajectory& traj,
                                             size_t first_index, size_t second_index) {
  if (first_index >= traj.size() || second_index >= traj.size())
    throw Error(ErrorKind::kOutOfRangeValue, "keyframe index outside trajectory");
  InterpolationRequest req{first, second, {}};
  if (first_index < second_index) {
    for (size_t i = first_index + 1; i < second_index; ++i) req.cameras.push_back(traj.camera(i));
  } else {
    for (size_t i = first_index; i-- > second_index + 1;) req.cameras.push_back(traj.camera(i));
  }
  return req;
}

std::vector<RenderBundle> render_interpolation_conditions(const InterpolationRequest& req,
                                                          const projection::RenderOptions& options) {
  validate(req).throw_if_error();
  PointCloud cloud = projection::back_project(req.first.image, req.first.camera, 0);
  projection::append_cloud(cloud, projection::back_project(req.second.image, req.second.camera, 1));

  std::vector<RenderBundle> out(req.cameras.size());
  parallel_chunks(out.size(), [&](size_t b, size_t e, unsigned) {
    for (size_t i = b; i < e; ++i) {
      out[i] = projection::render_points(cloud, req.cameras[i], options);
      std::fill(out[i].image.depth.begin(), out[i].image.depth.end(), 0.0);
    }
  });
  return out;
}

RgbdImage refine_stub(const RenderBundle& bundle) {
  const RgbdImage& in = bundle.image;
  const VisibilityMask& m = bundle.mask;
  if (m.width != in.width || m.height != in.height)
    throw Error(ErrorKind::kDimensionMismatch, "mask and image dims differ");
  RgbdImage out = in;
  if (m.count() == 0) {
    std::fill(out.rgb.begin(), out.rgb.end(), 0.5);
    return out;
  }
  const int W = in.width, H = in.height;
  for (int v = 0; v < H; ++v) {
    for (int u = 0; u < W; ++u) {
      const size_t p = in.index(u, v);
      if (m.mask[p]) continue;
      // Expanding square rings; a ring at Chebyshev radius r cannot beat a squared distance < r^2.
      std::tuple<long long, int, int> best{std::numeric_limits<long long>::max(), 0, 0};
      const int max_r = std::max(W, H);
      for (int r = 1; r <= max_r; ++r) {
        if (static_cast<long long>(r) * r > std::get<0>(best)) break;
        for (int y = v - r; y <= v + r; ++y) {
          if (y < 0 || y >= H) continue;
          const bool edge_row = (y == v - r || y == v + r);
          for (int x = u - r; x <= u + r; x += edge_row ? 1 : 2 * r) {
            if (x < 0 || x >= W || !m.mask[in.index(x, y)]) continue;
            const long long d2 = static_cast<long long>(x - u) * (x - u) + static_cast<long long>(y - v) * (y - v);
            best = std::min(best, std::tuple<long long, int, int>{d2, y, x});
          }
        }
      }
      const size_t q = in.index(std::get<2>(best), std::get<1>(best));
      for (int c = 0; c < 3; ++c) out.rgb[p * 3 + c] = in.rgb[q * 3 + c];
      out.depth[p] = in.depth[q];
    }
  }
  return out;
}

std::vector<RgbdImage> refine_stub(std::span<const RenderBundle> bundles) {
  std::vector<RgbdImage> out;
  out.reserve(bundles.size());
  for (const auto& b : bundles) out.push_back(refine_stub(b));
  return out;
}

}  // namespace scapegeom::interpolation
