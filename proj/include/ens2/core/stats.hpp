#pragma once

#include <span>
#include <utility>
#include <vector>

#include "ens2/core/series.hpp"

namespace ens2::core {

// Parameters of the zero-mean map x' = (x - mu) / sigma. Population
// standard deviation throughout.
struct NormalizationParams {
  double mu = 0.0;
  double sigma = 1.0;
};

struct SeriesStats {
  std::size_t count = 0;
  double mean = 0.0;
  double std = 0.0;  // population convention (divide by n)
  double min = 0.0;
  double q25 = 0.0;
  double q50 = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

double mean(std::span<const double> x);
// Population standard deviation.
double population_std(std::span<const double> x);

// Empirical quantile by linear interpolation between order statistics
// (position p * (n - 1)). Throws on empty input or p outside [0, 1].
double quantile(std::span<const double> x, double p);
// Same, for input already sorted ascending.
double quantile_sorted(std::span<const double> sorted, double p);

NormalizationParams fit_normalization(std::span<const double> x);
std::pair<Series, NormalizationParams> normalize(const Series& series);
Series denormalize(const Series& series, const NormalizationParams& params);

inline double apply(const NormalizationParams& p, double x) { return (x - p.mu) / p.sigma; }
inline double invert(const NormalizationParams& p, double x) { return x * p.sigma + p.mu; }

SeriesStats describe(std::span<const double> x);
SeriesStats describe(const Series& series);

}  // namespace ens2::core
