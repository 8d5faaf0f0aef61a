#include "scapegeom/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "scapegeom/parallel.hpp"

namespace scapegeom::diffusion {

namespace {

void require_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size())
    throw Error(ErrorKind::kDimensionMismatch, std::string(what) + ": sizes " + std::to_string(a.size()) +
                                                   " and " + std::to_string(b.size()) + " differ");
}

std::vector<double> gaussian(std::mt19937_64& rng, size_t n) {
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

}  // namespace

NoiseSchedule::NoiseSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw Error(ErrorKind::kOutOfRangeValue, "schedule needs at least one step");
  alpha_bars_.resize(betas_.size() + 1);
  alpha_bars_[0] = 1.0;
  for (size_t i = 0; i < betas_.size(); ++i) {
    const double b = betas_[i];
    if (!(b > 0.0 && b < 1.0))
      throw Error(ErrorKind::kOutOfRangeValue, "beta_" + std::to_string(i + 1) + " must lie in (0, 1)");
    alpha_bars_[i + 1] = alpha_bars_[i] * (1.0 - b);
  }
}

NoiseSchedule NoiseSchedule::linear(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw Error(ErrorKind::kOutOfRangeValue, "schedule needs at least one step");
  std::vector<double> betas(static_cast<size_t>(steps));
  for (int i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(i) / (steps - 1);
    betas[size_t(i)] = beta_start + f * (beta_end - beta_start);
  }
  return NoiseSchedule(std::move(betas));
}

NoiseSchedule NoiseSchedule::default_linear(int steps) {
  if (steps < 1) throw Error(ErrorKind::kOutOfRangeValue, "schedule needs at least one step");
  const double scale = 1000.0 / steps;
  return linear(steps, 1e-4 * scale, std::min(0.02 * scale, 0.999));
}

void NoiseSchedule::check(int t, int lo) const {
  if (t < lo || t > steps())
    throw Error(ErrorKind::kTimestepOutOfRange,
                "t=" + std::to_string(t) + " outside [" + std::to_string(lo) + ", " + std::to_string(steps()) + "]");
}

double NoiseSchedule::beta(int t) const {
  check(t, 1);
  return betas_[size_t(t) - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
  check(t, 0);
  return alpha_bars_[size_t(t)];
}

double NoiseSchedule::posterior_variance(int t) const {
  check(t, 1);
  return (1.0 - alpha_bars_[size_t(t) - 1]) / (1.0 - alpha_bars_[size_t(t)]) * betas_[size_t(t) - 1];
}

Sample forward_sample(std::span<const double> x0, int t, std::span<const double> noise,
                      const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.steps())
    throw Error(ErrorKind::kTimestepOutOfRange, "forward_sample needs 1 <= t <= T, got " + std::to_string(t));
  require_same_size(x0, noise, "forward_sample");
  const double ab = schedule.alpha_bar(t);
  const double a = std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  Sample out(x0.size());
  for (size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + b * noise[i];
  return out;
}

Sample reverse_step(std::span<const double> x_t, int t, std::span<const double> score,
                    const NoiseSchedule& schedule, std::span<const double> noise, ReverseVariance variance) {
  if (t < 1 || t > schedule.steps())
    throw Error(ErrorKind::kTimestepOutOfRange, "reverse_step needs 1 <= t <= T, got " + std::to_string(t));
  require_same_size(x_t, score, "reverse_step");
  const double beta = schedule.beta(t);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(1.0 - beta);
  Sample out(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) out[i] = (x_t[i] + beta * score[i]) * inv_sqrt_alpha;
  if (t == 1) return out;
  require_same_size(x_t, noise, "reverse_step noise");
  const double var = variance == ReverseVariance::kPosterior ? schedule.posterior_variance(t) : beta;
  const double sd = std::sqrt(var);
  for (size_t i = 0; i < out.size(); ++i) out[i] += sd * noise[i];
  return out;
}

Sample score_from_noise(std::span<const double> eps, int t, const NoiseSchedule& schedule) {
  const double s = std::sqrt(1.0 - schedule.alpha_bar(t));
  Sample out(eps.size());
  for (size_t i = 0; i < eps.size(); ++i) out[i] = -eps[i] / s;
  return out;
}

Sample noise_from_score(std::span<const double> score, int t, const NoiseSchedule& schedule) {
  const double s = std::sqrt(1.0 - schedule.alpha_bar(t));
  Sample out(score.size());
  for (size_t i = 0; i < score.size(); ++i) out[i] = -score[i] * s;
  return out;
}

Sample predict_x0(std::span<const double> x_t, std::span<const double> score, int t,
                  const NoiseSchedule& schedule) {
  require_same_size(x_t, score, "predict_x0");
  const double ab = schedule.alpha_bar(t);
  const double noise_scale = std::sqrt(1.0 - ab);
  const double inv_signal = 1.0 / std::sqrt(ab);
  const Sample eps = noise_from_score(score, t, schedule);
  Sample out(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) out[i] = (x_t[i] - noise_scale * eps[i]) * inv_signal;
  return out;
}

Sample NoisePredictionDenoiser::score(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
                                      const RenderBundle* condition) const {
  return score_from_noise(predict_noise(x_t, t, schedule, condition), t, schedule);
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(std::vector<double> mean, double sigma)
    : mean_(std::move(mean)), sigma_(sigma) {
  if (mean_.empty()) throw Error(ErrorKind::kDimensionMismatch, "mean must have at least one element");
  if (!(sigma > 0.0)) throw Error(ErrorKind::kOutOfRangeValue, "sigma must be > 0");
}

Sample AnalyticGaussianDenoiser::score(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
                                       const RenderBundle*) const {
  if (mean_.size() != 1 && mean_.size() != x_t.size())
    throw Error(ErrorKind::kDimensionMismatch, "mean size does not match the sample");
  const double ab = schedule.alpha_bar(t);
  const double signal = std::sqrt(ab);
  const double var = ab * sigma_ * sigma_ + 1.0 - ab;
  Sample out(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) {
    const double mu = mean_.size() == 1 ? mean_[0] : mean_[i];
    out[i] = -(x_t[i] - signal * mu) / var;
  }
  return out;
}

std::unique_ptr<Denoiser> analytic_gaussian_denoiser(double mean, double sigma) {
  return std::make_unique<AnalyticGaussianDenoiser>(std::vector<double>{mean}, sigma);
}

std::unique_ptr<Denoiser> analytic_gaussian_denoiser(std::vector<double> mean, double sigma) {
  return std::make_unique<AnalyticGaussianDenoiser>(std::move(mean), sigma);
}

Sample ClassifierFreeGuidance::score(std::span<const double> x_t, int t, const NoiseSchedule& schedule,
                                     const RenderBundle* condition) const {
  Sample uncond = base_.score(x_t, t, schedule, nullptr);
  if (condition == nullptr) return uncond;
  const Sample cond = base_.score(x_t, t, schedule, condition);
  require_same_size(uncond, cond, "classifier-free guidance");
  for (size_t i = 0; i < uncond.size(); ++i) uncond[i] += scale_ * (cond[i] - uncond[i]);
  return uncond;
}

Status validate(const GuidanceConfig& cfg) {
  if (!(cfg.w >= 0.0) || !std::isfinite(cfg.w)) return Status::Fail(ErrorKind::kOutOfRangeValue, "w must be >= 0");
  if (cfg.t_min > cfg.t_max) return Status::Fail(ErrorKind::kOutOfRangeValue, "t_min exceeds t_max");
  if (auto s = consistency::validate(cfg.consistency); !s) return s;
  return depth::validate(cfg.codec);
}

Sample guided_score(std::span<const double> score, std::span<const double> x_t, const RenderBundle& bundle,
                    const GuidanceConfig& cfg, const NoiseSchedule& schedule, int t) {
  validate(cfg).throw_if_error();
  if (cfg.w == 0.0 || t < cfg.t_min || t > cfg.t_max) return Sample(score.begin(), score.end());
  const Sample x0 = predict_x0(x_t, score, t, schedule);
  const std::vector<double> h = consistency::to_normalized(bundle.image, cfg.codec);
  const std::vector<double> grad = consistency::warp_loss_gradient(x0, h, bundle.mask, cfg.consistency);
  const double chain = 1.0 / std::sqrt(schedule.alpha_bar(t));
  Sample out(score.begin(), score.end());
  for (size_t i = 0; i < out.size(); ++i) out[i] -= cfg.w * chain * grad[i];
  return out;
}

Sample sample(const Denoiser& denoiser, const NoiseSchedule& schedule, size_t dim, const RenderBundle* condition,
              const GuidanceConfig* guidance, std::uint64_t seed, const SamplerOptions& options) {
  if (guidance) validate(*guidance).throw_if_error();
  std::mt19937_64 rng(seed);
  Sample x = gaussian(rng, dim);
  const bool guided = guidance != nullptr && condition != nullptr && guidance->w > 0.0;
  for (int t = schedule.steps(); t >= 1; --t) {
    Sample s = denoiser.score(x, t, schedule, condition);
    if (s.size() != x.size())
      throw Error(ErrorKind::kDimensionMismatch, "denoiser output size differs from its input");
    if (guided) s = guided_score(s, x, *condition, *guidance, schedule, t);
    const Sample noise = t > 1 ? gaussian(rng, dim) : Sample{};
    x = reverse_step(x, t, s, schedule, noise, options.variance);
  }
  return x;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the combined key
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::vector<Sample> sample_batch(const Denoiser& denoiser, const NoiseSchedule& schedule, size_t dim,
                                 const RenderBundle* condition, const GuidanceConfig* guidance, std::uint64_t seed,
                                 size_t count, const SamplerOptions& options) {
  std::vector<Sample> out(count);
  auto run = [&](size_t begin, size_t end, unsigned) {
    for (size_t i = begin; i < end; ++i)
      out[i] = sample(denoiser, schedule, dim, condition, guidance, derive_seed(seed, i), options);
  };
  if (denoiser.thread_safe())
    parallel_chunks(count, run);
  else
    run(0, count, 0);
  return out;
}

}  // namespace scapegeom::diffusion
