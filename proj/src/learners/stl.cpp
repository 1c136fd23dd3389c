#include "ens2/learners/stl.hpp"

#include <cmath>
#include <limits>

#include "ens2/common/error.hpp"
#include "ens2/learners/loess.hpp"

namespace ens2::learners {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Mean of x[begin, begin + len) from prefix sums.
double window_mean(const std::vector<double>& prefix, std::size_t begin, std::size_t len) {
  return (prefix[begin + len] - prefix[begin]) / static_cast<double>(len);
}

}  // namespace

double StlDecomposition::last_trend() const {
  if (trend_end <= trend_begin) throw InvalidArgument("stl: empty decomposition");
  return trend[trend_end - 1];
}

std::vector<double> centered_moving_average(std::span<const double> x, std::size_t m) {
  if (m < 1) throw InvalidArgument("moving average: window must be >= 1");
  const std::size_t n = x.size();
  std::vector<double> out(n, kNaN);
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + x[i];

  const std::size_t h = m / 2;
  if (n < 2 * h + 1) return out;
  if (m % 2 == 1) {
    for (std::size_t i = h; i + h < n; ++i) out[i] = window_mean(prefix, i - h, m);
  } else {
    // m-MA over [i - h, i + h) and [i - h + 1, i + h], then averaged (2 x m-MA).
    for (std::size_t i = h; i + h < n; ++i) {
      out[i] = 0.5 * (window_mean(prefix, i - h, m) + window_mean(prefix, i - h + 1, m));
    }
  }
  return out;
}

StlDecomposition stl_decompose(std::span<const double> x, std::size_t period, std::size_t trend_window) {
  if (period < 1) throw InvalidArgument("stl: period must be >= 1");
  if (trend_window < 2) throw InvalidArgument("stl: trend window must be >= 2");
  if (x.size() < 2 * period) {
    throw InvalidArgument("stl: series of length " + std::to_string(x.size()) + " is shorter than two periods");
  }
  const std::size_t n = x.size();
  const std::size_t h = trend_window / 2;
  if (n < 2 * h + period) throw InvalidArgument("stl: trend window too wide for the series length");

  StlDecomposition out;
  out.period = period;
  out.trend_window = trend_window;
  out.trend = centered_moving_average(x, trend_window);
  out.trend_begin = h;
  out.trend_end = n - h;

  // Per-phase average of the smoothed cycle-subseries of y - T.
  out.profile.assign(period, 0.0);
  std::vector<double> sub;
  for (std::size_t phase = 0; phase < period; ++phase) {
    sub.clear();
    std::size_t i = out.trend_begin + ((phase + period - out.trend_begin % period) % period);
    for (; i < out.trend_end; i += period) sub.push_back(x[i] - out.trend[i]);
    if (sub.size() >= 3) sub = loess_smooth(sub, sub.size(), 1);
    double sum = 0.0;
    for (double v : sub) sum += v;
    out.profile[phase] = sum / static_cast<double>(sub.size());
  }
  double centre = 0.0;
  for (double v : out.profile) centre += v;
  centre /= static_cast<double>(period);
  for (double& v : out.profile) v -= centre;

  out.seasonal.resize(n);
  out.residual.assign(n, kNaN);
  for (std::size_t i = 0; i < n; ++i) {
    out.seasonal[i] = out.profile[i % period];
    if (out.trend_defined(i)) out.residual[i] = x[i] - out.trend[i] - out.seasonal[i];
  }
  return out;
}

double stl_predict_at(const StlDecomposition& decomp, std::size_t index) {
  if (decomp.profile.empty()) throw InvalidArgument("stl: empty decomposition");
  return decomp.last_trend() + decomp.profile[index % decomp.period];
}

double stl_predict_next(const StlDecomposition& decomp, std::span<const double> history) {
  return stl_predict_at(decomp, history.size());
}

StlForecastState StlForecastState::from(const StlDecomposition& decomp, std::size_t origin) {
  return StlForecastState{decomp.last_trend(), decomp.profile, origin};
}

double StlForecastState::predict(std::size_t global_index) const {
  if (profile.empty()) throw InvalidArgument("stl: empty forecast state");
  const std::size_t offset = global_index >= origin ? global_index - origin : 0;
  return level + profile[offset % profile.size()];
}

}  // namespace ens2::learners
