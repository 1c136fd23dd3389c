#include "ens2/core/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ens2/common/error.hpp"

namespace ens2::core {

double mean(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("mean of empty sequence");
  double sum = 0.0;
  for (double v : x) sum += v;
  return sum / static_cast<double>(x.size());
}

double population_std(std::span<const double> x) {
  const double mu = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(x.size()));
}

double quantile_sorted(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw InvalidArgument("quantile of empty sequence");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("quantile probability outside [0, 1]");
  const double pos = p * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> x, double p) {
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_sorted(sorted, p);
}

NormalizationParams fit_normalization(std::span<const double> x) {
  if (x.size() < 2) throw InvalidArgument("normalization needs at least 2 points");
  NormalizationParams p{mean(x), population_std(x)};
  if (!(p.sigma > 0.0)) throw InvalidArgument("cannot normalize a constant series (sigma = 0)");
  return p;
}

std::pair<Series, NormalizationParams> normalize(const Series& series) {
  const auto values = series.values();
  const auto params = fit_normalization(values);
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = apply(params, values[i]);
  return {series.with_values(out), params};
}

Series denormalize(const Series& series, const NormalizationParams& params) {
  if (!(params.sigma > 0.0) || !std::isfinite(params.mu)) {
    throw InvalidArgument("invalid normalization parameters");
  }
  auto values = series.values();
  for (double& v : values) v = invert(params, v);
  return series.with_values(values);
}

SeriesStats describe(std::span<const double> x) {
  if (x.empty()) throw InvalidArgument("describe of empty series");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  SeriesStats s;
  s.count = x.size();
  s.mean = mean(x);
  s.std = population_std(x);
  s.min = sorted.front();
  s.q25 = quantile_sorted(sorted, 0.25);
  s.q50 = quantile_sorted(sorted, 0.50);
  s.q75 = quantile_sorted(sorted, 0.75);
  s.max = sorted.back();
  return s;
}

SeriesStats describe(const Series& series) { return describe(series.values()); }

}  // namespace ens2::core
