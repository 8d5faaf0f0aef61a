#pragma once

#include <span>
#include <vector>

#include "scapegeom/core_types.hpp"
#include "scapegeom/depth_codec.hpp"

namespace scapegeom::consistency {

/// Channels per pixel in the normalized RGB-D layout (r, g, b, depth / max_depth).
inline constexpr int kChannels = 4;

struct ConsistencyConfig {
  double trim_fraction = 0.05;  // largest residuals excluded
  double depth_weight = 1.0;    // weight of the depth channel relative to each color channel
};

Status validate(const ConsistencyConfig& cfg);

/// Interleaved H×W×4 buffer with depth normalized by the codec (clamped at max_depth).
std::vector<double> to_normalized(const RgbdImage& image, const depth::DepthCodecConfig& codec = {});
/// Inverse layout conversion. Values are copied as-is; no clamping.
RgbdImage from_normalized(std::span<const double> x, int width, int height,
                          const depth::DepthCodecConfig& codec = {});

/// ceil(trim_fraction * K), absorbing binary rounding of the product.
size_t trim_count(size_t masked_pixels, double trim_fraction);

struct WarpLoss {
  double loss = 0.0;
  size_t kept_pixels = 0;
  size_t trimmed_pixels = 0;
};

/// Trimmed masked MSE between x and h over normalized RGB-D buffers. Per-pixel residual is the
/// weighted mean of squared channel differences; the trim_count largest residuals among mask=1
/// pixels are dropped (ties broken by pixel index) and the survivors averaged.
/// Throws EmptyOverlap when no pixel survives.
WarpLoss warp_loss_detailed(std::span<const double> x, std::span<const double> h, const VisibilityMask& mask,
                            const ConsistencyConfig& cfg = {});
double warp_loss(std::span<const double> x, std::span<const double> h, const VisibilityMask& mask,
                 const ConsistencyConfig& cfg = {});

/// d(warp_loss)/dx with the trimmed set held fixed at x. Zero at unmasked and trimmed pixels.
std::vector<double> warp_loss_gradient(std::span<const double> x, std::span<const double> h,
                                       const VisibilityMask& mask, const ConsistencyConfig& cfg = {});

WarpLoss warp_loss_detailed(const RgbdImage& x, const RgbdImage& h, const VisibilityMask& mask,
                            const ConsistencyConfig& cfg = {}, const depth::DepthCodecConfig& codec = {});
double warp_loss(const RgbdImage& x, const RgbdImage& h, const VisibilityMask& mask,
                 const ConsistencyConfig& cfg = {}, const depth::DepthCodecConfig& codec = {});
/// Gradient w.r.t. the normalized channels of x (interleaved H×W×4).
std::vector<double> warp_loss_gradient(const RgbdImage& x, const RgbdImage& h, const VisibilityMask& mask,
                                       const ConsistencyConfig& cfg = {},
                                       const depth::DepthCodecConfig& codec = {});

/// Drops the floor(drop_fraction * N) largest losses (ties: higher index first) and returns the
/// kept indices in their original order.
std::vector<size_t> filter_dataset(std::span<const double> losses, double drop_fraction);

}  // namespace scapegeom::consistency
