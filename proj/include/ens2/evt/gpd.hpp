#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ens2::evt {

// Two-parameter generalized Pareto distribution
//   F(x; sigma, k) = 1 - (1 - k x / sigma)^(1/k)   (k != 0)
//                  = 1 - exp(-x / sigma)           (k == 0)
// k > 0 gives bounded support [0, sigma / k]; k = 1 is uniform on [0, sigma].
struct GpdParams {
  double sigma = 1.0;
  double k = 0.0;

  double b() const noexcept { return k / sigma; }
};

// |k| below this uses the exponential limit.
inline constexpr double kShapeEpsilon = 1e-8;

void validate(const GpdParams& params);

double gpd_cdf(double x, const GpdParams& params);
// Inverse CDF for u in [0, 1).
double gpd_quantile(double u, const GpdParams& params);
// Inverse-transform samples.
std::vector<double> sample_gpd(const GpdParams& params, std::size_t n, std::uint64_t seed);

// Moment estimators: with r = mean^2 / variance,
//   k = (r - 1) / 2,  sigma = mean (r + 1) / 2.
GpdParams gpd_fit_moments(std::span<const double> excesses);

enum class FitStatus { converged, moment_fallback };

struct LmeFit {
  GpdParams params;
  FitStatus status = FitStatus::converged;
  double residual = 0.0;  // root residual in scale-free units
  int evaluations = 0;
};

// Likelihood moment estimation. Solves for b < 1 / max(X)
//   (1/n) sum 1 / (1 - b X_i) = 1 / (1 - k(b)),   k(b) = -(1/n) sum ln(1 - b X_i),
// away from the trivial double root at b = 0, then sigma = k / b. `b_hint`
// (a previous solution) enables a warm-started Newton solve; the cold path is
// bracketed bisection. When no sign change exists the moment estimates are
// returned with status moment_fallback.
LmeFit gpd_fit_lme(std::span<const double> excesses, std::optional<double> b_hint = std::nullopt);

struct LemmaCheck {
  double empirical = 0.0;
  double theoretical = 0.0;
  double standard_error = 0.0;
};

// Monte-Carlo mean of (1 - b X)^r for X ~ GPD(params), b = k / sigma, next
// to the closed form 1 / (1 + r k).
LemmaCheck lemma_moment_check(const GpdParams& params, double r, std::size_t n_samples, std::uint64_t seed);

// Level z exceeded with probability q under the POT tail model of N_t peaks
// over threshold t among n observations:
//   z = t + (sigma / k) (1 - (q n / N_t)^k),   z = t - sigma ln(q n / N_t) as k -> 0.
double pot_quantile(double t, const GpdParams& params, double q, std::uint64_t n, std::uint64_t n_peaks);

}  // namespace ens2::evt
