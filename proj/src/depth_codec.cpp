#include "scapegeom/depth_codec.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace scapegeom::depth {

Status validate(const DepthCodecConfig& cfg) {
  if (!(cfg.max_depth > 0.0) || !std::isfinite(cfg.max_depth))
    return Status::Fail(ErrorKind::kOutOfRangeValue, "max_depth must be positive");
  return Status::Ok();
}

double normalize_depth(double meters, const DepthCodecConfig& cfg) {
  if (meters < 0.0 || std::isnan(meters))
    throw Error(ErrorKind::kNegativeDepth, "depth " + std::to_string(meters) + " m is negative");
  return std::min(meters, cfg.max_depth) / cfg.max_depth;
}

double denormalize_depth(double normalized, const DepthCodecConfig& cfg) {
  return normalized * cfg.max_depth;
}

std::uint16_t encode_depth16(double meters, const DepthCodecConfig& cfg) {
  const double n = normalize_depth(meters, cfg);
  return static_cast<std::uint16_t>(std::lround(n * DepthCodecConfig::kMaxCode));
}

double decode_depth16(std::uint16_t code, const DepthCodecConfig& cfg) {
  return static_cast<double>(code) / DepthCodecConfig::kMaxCode * cfg.max_depth;
}

std::vector<std::uint16_t> encode_depth16(std::span<const double> meters, const DepthCodecConfig& cfg) {
  std::vector<std::uint16_t> out(meters.size());
  std::transform(meters.begin(), meters.end(), out.begin(), [&](double d) { return encode_depth16(d, cfg); });
  return out;
}

std::vector<double> decode_depth16(std::span<const std::uint16_t> codes, const DepthCodecConfig& cfg) {
  std::vector<double> out(codes.size());
  std::transform(codes.begin(), codes.end(), out.begin(), [&](std::uint16_t c) { return decode_depth16(c, cfg); });
  return out;
}

double vae_loss(std::span<const double> recon_rgb, std::span<const double> recon_depth,
                const RgbdImage& target, double kl_term, double lambda_depth,
                const DepthCodecConfig& cfg) {
  if (recon_rgb.size() != target.rgb.size() || recon_depth.size() != target.depth.size() ||
      target.depth.empty())
    throw Error(ErrorKind::kDimensionMismatch, "reconstruction and target sizes differ");
  if (lambda_depth < 0.0) throw Error(ErrorKind::kOutOfRangeValue, "lambda_depth must be >= 0");

  double rgb_sq = 0.0;
  for (size_t i = 0; i < recon_rgb.size(); ++i) {
    const double d = recon_rgb[i] - target.rgb[i];
    rgb_sq += d * d;
  }
  double depth_sq = 0.0;
  for (size_t i = 0; i < recon_depth.size(); ++i) {
    const double d = normalize_depth(recon_depth[i], cfg) - normalize_depth(target.depth[i], cfg);
    depth_sq += d * d;
  }
  const double rgb_mse = rgb_sq / static_cast<double>(recon_rgb.size());
  const double depth_mse = depth_sq / static_cast<double>(recon_depth.size());
  return rgb_mse + lambda_depth * depth_mse + kl_term;
}

}  // namespace scapegeom::depth
