#pragma once

#include <climits>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "scapegeom/consistency.hpp"
#include "scapegeom/core_types.hpp"
#include "scapegeom/depth_codec.hpp"

namespace scapegeom::diffusion {

using Sample = std::vector<double>;

/// Variance schedule beta_1..beta_T with derived alpha_t and cumulative alpha_bar_t.
/// Timesteps are 1-based; alpha_bar(0) = 1.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> betas);

  static NoiseSchedule linear(int steps, double beta_start, double beta_end);
  /// Linear 1e-4..0.02, with both endpoints scaled by 1000/steps so alpha_bar_T stays near 0 for
  /// short schedules.
  static NoiseSchedule default_linear(int steps);

  int steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const;
  double alpha(int t) const { return 1.0 - beta(t); }
  double alpha_bar(int t) const;
  /// (1 - alpha_bar_{t-1}) / (1 - alpha_bar_t) * beta_t.
  double posterior_variance(int t) const;

  const std::vector<double>& betas() const { return betas_; }

 private:
  void check(int t, int lo) const;

  std::vector<double> betas_;
  std::vector<double> alpha_bars_;  // index t, alpha_bars_[0] = 1
};

/// Noise variance used by the ancestral step: posterior beta-tilde_t, or beta_t.
enum class ReverseVariance { kPosterior, kForward };

/// sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) noise.
Sample forward_sample(std::span<const double> x0, int t, std::span<const double> noise,
                      const NoiseSchedule& schedule);

/// Ancestral step: mean (x_t + beta_t score) / sqrt(alpha_t) plus scaled noise; t = 1 returns the mean.
Sample reverse_step(std::span<const double> x_t, int t, std::span<const double> score,
                    const NoiseSchedule& schedule, std::span<const double> noise,
                    ReverseVariance variance = ReverseVariance::kPosterior);

/// score = -eps / sqrt(1 - alpha_bar_t), and its inverse.
Sample score_from_noise(std::span<const double> eps, int t, const NoiseSchedule& schedule);
Sample noise_from_score(std::span<const double> score, int t, const NoiseSchedule& schedule);

/// One-step clean estimate (x_t - sqrt(1 - alpha_bar_t) eps) / sqrt(alpha_bar_t).
Sample predict_x0(std::span<const double> x_t, std::span<const double> score, int t,
                  const NoiseSchedule& schedule);

/// Score model s(x_t, t | condition). Implementations that cannot be called from several
/// threads at once must return false from thread_safe().
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  virtual Sample score(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
                       const RenderBundle* condition) const = 0;
  virtual bool thread_safe() const { return true; }
};

/// Adapter for models that predict the added noise instead of the score.
class NoisePredictionDenoiser : public Denoiser {
 public:
  Sample score(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
               const RenderBundle* condition) const final;

 protected:
  virtual Sample predict_noise(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
                               const RenderBundle* condition) const = 0;
};

/// Exact score of N(mu, sigma^2 I) data after diffusion to step t:
/// -(x_t - sqrt(alpha_bar_t) mu) / (alpha_bar_t sigma^2 + 1 - alpha_bar_t).
/// A one-element mean broadcasts over every coordinate. Ignores the condition.
class AnalyticGaussianDenoiser : public Denoiser {
 public:
  AnalyticGaussianDenoiser(std::vector<double> mean, double sigma);

  Sample score(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
               const RenderBundle* condition) const override;

  double sigma() const { return sigma_; }

 private:
  std::vector<double> mean_;
  double sigma_;
};

std::unique_ptr<Denoiser> analytic_gaussian_denoiser(double mean, double sigma);
std::unique_ptr<Denoiser> analytic_gaussian_denoiser(std::vector<double> mean, double sigma);

/// score_uncond + scale * (score_cond - score_uncond), built from one conditional model.
class ClassifierFreeGuidance : public Denoiser {
 public:
  explicit ClassifierFreeGuidance(const Denoiser& base, double scale = 7.5) : base_(base), scale_(scale) {}

  Sample score(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
               const RenderBundle* condition) const override;
  bool thread_safe() const override { return base_.thread_safe(); }

 private:
  const Denoiser& base_;
  double scale_;
};

/// Warp-consistent guidance. Positive w lowers the warp loss of the one-step x0 prediction.
/// Guidance is applied only for t in [t_min, t_max].
struct GuidanceConfig {
  double w = 0.0;
  consistency::ConsistencyConfig consistency;
  depth::DepthCodecConfig codec;
  int t_min = 1;
  int t_max = INT_MAX;
};

Status validate(const GuidanceConfig& cfg);

/// s - w * grad_{x_t} L_d(x0_hat(x_t), h; m), with grad_{x_t} = grad_{x0_hat} / sqrt(alpha_bar_t).
/// x_t must use the interleaved H×W×4 normalized RGB-D layout of the bundle.
Sample guided_score(std::span<const double> score, std::span<const double> x_t, const RenderBundle& bundle,
                    const GuidanceConfig& cfg, const NoiseSchedule& schedule, int t);

struct SamplerOptions {
  ReverseVariance variance = ReverseVariance::kPosterior;
};

/// Seeded ancestral sampling from x_T ~ N(0, I): guided_score (when guidance and condition are
/// given) followed by reverse_step, for t = T..1.
Sample sample(const Denoiser& denoiser, const NoiseSchedule& schedule, size_t dim, const RenderBundle* condition,
              const GuidanceConfig* guidance, std::uint64_t seed, const SamplerOptions& options = {});

/// count independent trajectories; trajectory i uses a seed derived from (seed, i), so results do
/// not depend on the worker count.
std::vector<Sample> sample_batch(const Denoiser& denoiser, const NoiseSchedule& schedule, size_t dim,
                                 const RenderBundle* condition, const GuidanceConfig* guidance,
                                 std::uint64_t seed, size_t count, const SamplerOptions& options = {});

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace scapegeom::diffusion
