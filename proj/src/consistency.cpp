#include "scapegeom/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace scapegeom::consistency {

namespace {

// Guards ceil/floor against products like 0.07 * 100 = 7.000000000000001.
constexpr double kCountSlack = 1e-9;

struct Selection {
  // Survivors in ascending (residual, pixel) order.
  std::vector<std::pair<double, size_t>> kept;
  size_t trimmed = 0;
};

void check_inputs(std::span<const double> x, std::span<const double> h, const VisibilityMask& mask,
                  const ConsistencyConfig& cfg) {
  validate(cfg).throw_if_error();
  validate(mask).throw_if_error();
  const size_t expected = mask.pixel_count() * kChannels;
  if (x.size() != expected || h.size() != expected)
    throw Error(ErrorKind::kDimensionMismatch,
                "expected " + std::to_string(expected) + " values (H*W*4), got x=" + std::to_string(x.size()) +
                    " h=" + std::to_string(h.size()));
}

double channel_weight(int c, const ConsistencyConfig& cfg) { return c == kChannels - 1 ? cfg.depth_weight : 1.0; }

Selection select(std::span<const double> x, std::span<const double> h, const VisibilityMask& mask,
                 const ConsistencyConfig& cfg) {
  check_inputs(x, h, mask, cfg);
  std::vector<std::pair<double, size_t>> residuals;
  residuals.reserve(mask.count());
  for (size_t p = 0; p < mask.pixel_count(); ++p) {
    if (!mask.mask[p]) continue;
    double acc = 0.0;
    for (int c = 0; c < kChannels; ++c) {
      const double d = x[p * kChannels + c] - h[p * kChannels + c];
      acc += channel_weight(c, cfg) * d * d;
    }
    residuals.emplace_back(acc / kChannels, p);
  }
  const size_t k = residuals.size();
  if (k == 0) throw Error(ErrorKind::kEmptyOverlap, "visibility mask is empty");
  const size_t n_trim = trim_count(k, cfg.trim_fraction);
  if (n_trim >= k)
    throw Error(ErrorKind::kEmptyOverlap,
                "trimming removes all " + std::to_string(k) + " masked pixels");
  std::sort(residuals.begin(), residuals.end());
  residuals.resize(k - n_trim);
  return {std::move(residuals), n_trim};
}

}  // namespace

Status validate(const ConsistencyConfig& cfg) {
  if (!(cfg.trim_fraction >= 0.0 && cfg.trim_fraction < 1.0))
    return Status::Fail(ErrorKind::kOutOfRangeValue, "trim_fraction must be in [0, 1)");
  if (!(cfg.depth_weight >= 0.0) || !std::isfinite(cfg.depth_weight))
    return Status::Fail(ErrorKind::kOutOfRangeValue, "depth_weight must be >= 0");
  return Status::Ok();
}

std::vector<double> to_normalized(const RgbdImage& image, const depth::DepthCodecConfig& codec) {
  const size_t n = image.pixel_count();
  if (image.rgb.size() != n * 3 || image.depth.size() != n)
    throw Error(ErrorKind::kDimensionMismatch, "rgb/depth buffer sizes disagree with width x height");
  std::vector<double> out(n * kChannels);
  for (size_t p = 0; p < n; ++p) {
    out[p * 4 + 0] = image.rgb[p * 3 + 0];
    out[p * 4 + 1] = image.rgb[p * 3 + 1];
    out[p * 4 + 2] = image.rgb[p * 3 + 2];
    out[p * 4 + 3] = depth::normalize_depth(image.depth[p], codec);
  }
  return out;
}

RgbdImage from_normalized(std::span<const double> x, int width, int height, const depth::DepthCodecConfig& codec) {
  RgbdImage img(width, height);
  if (x.size() != img.pixel_count() * kChannels)
    throw Error(ErrorKind::kDimensionMismatch, "normalized buffer size disagrees with width x height x 4");
  for (size_t p = 0; p < img.pixel_count(); ++p) {
    for (int c = 0; c < 3; ++c) img.rgb[p * 3 + c] = x[p * 4 + c];
    img.depth[p] = depth::denormalize_depth(x[p * 4 + 3], codec);
  }
  return img;
}

size_t trim_count(size_t masked_pixels, double trim_fraction) {
  if (trim_fraction <= 0.0 || masked_pixels == 0) return 0;
  const double raw = trim_fraction * static_cast<double>(masked_pixels);
  return static_cast<size_t>(std::max(0.0, std::ceil(raw - kCountSlack)));
}

WarpLoss warp_loss_detailed(std::span<const double> x, std::span<const double> h, const VisibilityMask& mask,
                            const ConsistencyConfig& cfg) {
  const Selection sel = select(x, h, mask, cfg);
  double sum = 0.0;
  for (const auto& [r, p] : sel.kept) sum += r;
  return {sum / static_cast<double>(sel.kept.size()), sel.kept.size(), sel.trimmed};
}

double warp_loss(std::span<const double> x, std::span<const double> h, const VisibilityMask& mask,
                 const ConsistencyConfig& cfg) {
  return warp_loss_detailed(x, h, mask, cfg).loss;
}

std::vector<double> warp_loss_gradient(std::span<const double> x, std::span<const double> h,
                                       const VisibilityMask& mask, const ConsistencyConfig& cfg) {
  const Selection sel = select(x, h, mask, cfg);
  std::vector<double> grad(x.size(), 0.0);
  const double scale = 2.0 / (kChannels * static_cast<double>(sel.kept.size()));
  for (const auto& [r, p] : sel.kept)
    for (int c = 0; c < kChannels; ++c) {
      const size_t j = p * kChannels + c;
      grad[j] = scale * channel_weight(c, cfg) * (x[j] - h[j]);
    }
  return grad;
}

WarpLoss warp_loss_detailed(const RgbdImage& x, const RgbdImage& h, const VisibilityMask& mask,
                            const ConsistencyConfig& cfg, const depth::DepthCodecConfig& codec) {
  return warp_loss_detailed(to_normalized(x, codec), to_normalized(h, codec), mask, cfg);
}

double warp_loss(const RgbdImage& x, const RgbdImage& h, const VisibilityMask& mask, const ConsistencyConfig& cfg,
                 const depth::DepthCodecConfig& codec) {
  return warp_loss_detailed(x, h, mask, cfg, codec).loss;
}

std::vector<double> warp_loss_gradient(const RgbdImage& x, const RgbdImage& h, const VisibilityMask& mask,
                                       const ConsistencyConfig& cfg, const depth::DepthCodecConfig& codec) {
  return warp_loss_gradient(to_normalized(x, codec), to_normalized(h, codec), mask, cfg);
}

std::vector<size_t> filter_dataset(std::span<const double> losses, double drop_fraction) {
  if (!(drop_fraction >= 0.0 && drop_fraction < 1.0))
    throw Error(ErrorKind::kOutOfRangeValue, "drop_fraction must be in [0, 1)");
  const size_t n = losses.size();
  for (size_t i = 0; i < n; ++i)
    if (std::isnan(losses[i])) throw Error(ErrorKind::kOutOfRangeValue, "loss " + std::to_string(i) + " is NaN");
  const auto n_drop =
      static_cast<size_t>(std::floor(drop_fraction * static_cast<double>(n) + kCountSlack));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  // Largest loss first; among equal losses the higher index goes first.
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (losses[a] != losses[b]) return losses[a] > losses[b];
    return a > b;
  });
  std::vector<bool> dropped(n, false);
  for (size_t i = 0; i < n_drop; ++i) dropped[order[i]] = true;
  std::vector<size_t> kept;
  kept.reserve(n - n_drop);
  for (size_t i = 0; i < n; ++i)
    if (!dropped[i]) kept.push_back(i);
  return kept;
}

}  // namespace scapegeom::consistency
