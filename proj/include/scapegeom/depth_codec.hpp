#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scapegeom/core_types.hpp"

namespace scapegeom::depth {

struct DepthCodecConfig {
  double max_depth = kDefaultMaxDepth;  // meters
  static constexpr int kBits = 16;
  static constexpr std::uint32_t kMaxCode = 65535;
};

Status validate(const DepthCodecConfig& cfg);

/// min(d, max_depth) / max_depth. Throws NegativeDepth for d < 0.
double normalize_depth(double meters, const DepthCodecConfig& cfg = {});
/// Inverse of normalize_depth on [0, 1].
double denormalize_depth(double normalized, const DepthCodecConfig& cfg = {});

std::uint16_t encode_depth16(double meters, const DepthCodecConfig& cfg = {});
double decode_depth16(std::uint16_t code, const DepthCodecConfig& cfg = {});

std::vector<std::uint16_t> encode_depth16(std::span<const double> meters, const DepthCodecConfig& cfg = {});
std::vector<double> decode_depth16(std::span<const std::uint16_t> codes, const DepthCodecConfig& cfg = {});

/// RGB MSE + lambda_depth * normalized-depth MSE + kl_term. MSE stands in for the
/// reconstruction negative log-likelihoods.
double vae_loss(std::span<const double> recon_rgb, std::span<const double> recon_depth,
                const RgbdImage& target, double kl_term, double lambda_depth = 10.0,
                const DepthCodecConfig& cfg = {});

}  // namespace scapegeom::depth
