#include "ens2/evt/gpd.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ens2/common/error.hpp"

namespace ens2::evt {

void validate(const GpdParams& p) {
  if (!(p.sigma > 0.0) || !std::isfinite(p.sigma)) throw InvalidArgument("gpd: sigma must be positive");
  if (!std::isfinite(p.k)) throw InvalidArgument("gpd: shape must be finite");
}

double gpd_cdf(double x, const GpdParams& p) {
  validate(p);
  if (!(x >= 0.0)) throw InvalidArgument("gpd_cdf: x outside support (x < 0)");
  if (std::abs(p.k) < kShapeEpsilon) return -std::expm1(-x / p.sigma);
  const double arg = 1.0 - p.k * x / p.sigma;
  if (arg < 0.0) throw InvalidArgument("gpd_cdf: x beyond the upper support bound sigma / k");
  // 1 - arg^(1/k) = -expm1(log(arg) / k)
  return -std::expm1(std::log(arg) / p.k);
}

double gpd_quantile(double u, const GpdParams& p) {
  validate(p);
  if (!(u >= 0.0 && u < 1.0)) throw InvalidArgument("gpd_quantile: u must be in [0, 1)");
  const double l = std::log1p(-u);  // log(1 - u)
  if (std::abs(p.k) < kShapeEpsilon) return -p.sigma * l;
  // sigma / k * (1 - (1 - u)^k)
  return -p.sigma * std::expm1(p.k * l) / p.k;
}

std::vector<double> sample_gpd(const GpdParams& params, std::size_t n, std::uint64_t seed) {
  validate(params);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> out(n);
  for (auto& x : out) x = gpd_quantile(unif(rng), params);
  return out;
}

namespace {

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double max = 0.0;
};

SampleMoments sample_moments(std::span<const double> x) {
  SampleMoments m;
  double sum = 0.0;
  m.max = x[0];
  for (double v : x) {
    sum += v;
    m.max = std::max(m.max, v);
  }
  m.mean = sum / static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.variance = ss / static_cast<double>(x.size() - 1);
  return m;
}

void check_excesses(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("gpd fit: need at least 2 excesses");
  for (double v : x) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("gpd fit: excesses must be positive and finite");
  }
}

// Residual of the LME equation divided by beta^2, in units where the sample
// mean is 1 (beta = b * mean). Dividing out beta^2 removes the trivial double
// root at 0; near 0 a Taylor expansion replaces the cancelling difference.
class LmeResidual {
 public:
  LmeResidual(std::span<const double> x, double scale) : y_(x.size()) {
    max_ = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      y_[i] = x[i] / scale;
      max_ = std::max(max_, y_[i]);
    }
  }

  double max() const { return max_; }

  struct Eval {
    double h = 0.0;
    double dh = 0.0;
    double k = 0.0;
  };

  Eval operator()(double beta) {
    ++evaluations;
    if (std::abs(beta * max_) < kSeriesRegion) return series(beta);
    double inv = 0.0, log_sum = 0.0, dinv = 0.0, dk = 0.0;
    for (double y : y_) {
      const double t = 1.0 - beta * y;
      const double r = 1.0 / t;
      inv += r;
      log_sum += std::log(t);
      dk += y * r;
      dinv += y * r * r;
    }
    const double n = static_cast<double>(y_.size());
    inv /= n;
    dinv /= n;
    dk /= n;
    const double k = -log_sum / n;
    const double one_minus_k = 1.0 - k;
    const double g = inv - 1.0 / one_minus_k;
    const double dg = dinv - dk / (one_minus_k * one_minus_k);
    const double b2 = beta * beta;
    return {g / b2, dg / b2 - 2.0 * g / (b2 * beta), k};
  }

  double shape(double beta) const {
    double log_sum = 0.0;
    for (double y : y_) log_sum += std::log1p(-beta * y);
    return -log_sum / static_cast<double>(y_.size());
  }

  // sigma / mean = k / beta, with the beta -> 0 limit k / beta -> mean(y) = 1.
  double scaled_sigma(double beta, double k) {
    if (std::abs(beta * max_) < 1e-8) {
      ensure_moments();
      return 1.0 + 0.5 * beta * m_[2];
    }
    return k / beta;
  }

  int evaluations = 0;

 private:
  static constexpr double kSeriesRegion = 1e-4;

  void ensure_moments() {
    if (have_moments_) return;
    for (double y : y_) {
      double p = y;
      for (int j = 1; j <= 4; ++j) {
        m_[j] += p;
        p *= y;
      }
    }
    for (int j = 1; j <= 4; ++j) m_[j] /= static_cast<double>(y_.size());
    have_moments_ = true;
  }

  Eval series(double beta) {
    ensure_moments();
    const double m1 = m_[1], m2 = m_[2], m3 = m_[3], m4 = m_[4];
    const double c2 = 0.5 * m2 - m1 * m1;
    const double c3 = 2.0 * m3 / 3.0 - m1 * m2 - m1 * m1 * m1;
    const double c4 = 0.75 * m4 - 0.25 * m2 * m2 - 2.0 * m1 * m3 / 3.0 - 1.5 * m1 * m1 * m2 - m1 * m1 * m1 * m1;
    return {c2 + c3 * beta + c4 * beta * beta, c3 + 2.0 * c4 * beta, shape(beta)};
  }

  std::vector<double> y_;
  double max_ = 0.0;
  bool have_moments_ = false;
  double m_[5] = {0, 0, 0, 0, 0};
};

constexpr double kRootTolerance = 1e-10;

std::optional<double> newton_from(LmeResidual& h, double beta, double upper) {
  for (int iter = 0; iter < 8; ++iter) {
    const auto e = h(beta);
    if (std::abs(e.h) < kRootTolerance) return beta;
    if (!(std::abs(e.dh) > 0.0) || !std::isfinite(e.dh)) return std::nullopt;
    double next = beta - e.h / e.dh;
    if (!std::isfinite(next) || next >= upper) return std::nullopt;
    if (std::abs(next - beta) <= 1e-15 * std::max(std::abs(beta), 1e-12)) return next;
    beta = next;
  }
  return std::nullopt;
}

std::optional<double> bisect(LmeResidual& h, double upper) {
  double hi = upper * (1.0 - 1e-10);
  if (!(h(hi).h > 0.0)) {
    hi = upper * (1.0 - 1e-14);
    if (!(h(hi).h > 0.0)) return std::nullopt;
  }
  double lo = -1.0;
  int expansions = 0;
  while (!(h(lo).h < 0.0)) {
    if (++expansions > 60) return std::nullopt;
    lo *= 4.0;
  }
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double v = h(mid).h;
    if (std::abs(v) < kRootTolerance) return mid;
    (v < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

GpdParams gpd_fit_moments(std::span<const double> excesses) {
  check_excesses(excesses);
  const auto m = sample_moments(excesses);
  if (!(m.variance > 0.0)) throw ComputeError("gpd_fit_moments: zero sample variance");
  const double r = m.mean * m.mean / m.variance;
  return GpdParams{m.mean * (r + 1.0) / 2.0, (r - 1.0) / 2.0};
}

LmeFit gpd_fit_lme(std::span<const double> excesses, std::optional<double> b_hint) {
  check_excesses(excesses);
  const auto m = sample_moments(excesses);
  if (!(m.variance > 0.0)) {
    // No tail information: take the moment path, which reports the degeneracy.
    return LmeFit{gpd_fit_moments(excesses), FitStatus::moment_fallback, 0.0, 0};
  }
  LmeResidual h(excesses, m.mean);
  const double upper = 1.0 / h.max();

  std::optional<double> beta;
  if (b_hint && std::isfinite(*b_hint) && *b_hint * m.mean < upper) beta = newton_from(h, *b_hint * m.mean, upper);
  if (!beta) beta = bisect(h, upper);

  if (beta) {
    const double k = h.shape(*beta);
    const double sigma = h.scaled_sigma(*beta, k) * m.mean;
    if (std::isfinite(k) && std::isfinite(sigma) && sigma > 0.0) {
      const double residual = h(*beta).h;
      return LmeFit{GpdParams{sigma, k}, FitStatus::converged, residual, h.evaluations};
    }
  }
  return LmeFit{gpd_fit_moments(excesses), FitStatus::moment_fallback, 0.0, h.evaluations};
}

LemmaCheck lemma_moment_check(const GpdParams& params, double r, std::size_t n_samples, std::uint64_t seed) {
  validate(params);
  if (!(1.0 + r * params.k > 0.0)) throw InvalidArgument("lemma check: requires 1 + r k > 0");
  if (n_samples < 2) throw InvalidArgument("lemma check: need at least 2 samples");
  LemmaCheck out;
  out.theoretical = 1.0 / (1.0 + r * params.k);
  if (r == 0.0) {
    out.empirical = 1.0;
    return out;
  }
  const auto xs = sample_gpd(params, n_samples, seed);
  const double b = params.b();
  double sum = 0.0, sum_sq = 0.0;
  for (double x : xs) {
    const double v = std::pow(1.0 - b * x, r);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(n_samples);
  out.empirical = sum / n;
  const double var = std::max(0.0, (sum_sq - n * out.empirical * out.empirical) / (n - 1.0));
  out.standard_error = std::sqrt(var / n);
  return out;
}

double pot_quantile(double t, const GpdParams& params, double q, std::uint64_t n, std::uint64_t n_peaks) {
  validate(params);
  if (!(q > 0.0 && q < 1.0)) throw InvalidArgument("pot_quantile: q must be in (0, 1)");
  if (n_peaks == 0) throw InvalidArgument("pot_quantile: no peaks");
  if (n_peaks > n) throw InvalidArgument("pot_quantile: more peaks than observations");
  const double ratio = q * static_cast<double>(n) / static_cast<double>(n_peaks);
  if (std::abs(params.k) < kShapeEpsilon) return t - params.sigma * std::log(ratio);
  // (sigma / k)(1 - ratio^k) = -(sigma / k) expm1(k ln ratio)
  return t - params.sigma / params.k * std::expm1(params.k * std::log(ratio));
}

}  // namespace ens2::evt
