#pragma once

#include <span>
#include <vector>

namespace ens2::learners {

// Trend, seasonal and residual components. The centered moving-average trend
// is only defined on [trend_begin, trend_end); trend and residual hold NaN
// elsewhere. The seasonal component is defined everywhere, tiled from
// `profile` (one value per phase, summing to zero).
struct StlDecomposition {
  std::vector<double> trend;
  std::vector<double> seasonal;
  std::vector<double> residual;
  std::vector<double> profile;
  std::size_t period = 0;
  std::size_t trend_window = 0;
  std::size_t trend_begin = 0;
  std::size_t trend_end = 0;

  bool trend_defined(std::size_t i) const noexcept { return i >= trend_begin && i < trend_end; }
  double last_trend() const;
};

// Centered moving average of window m: once for odd m, as a 2 x m average
// for even m (m-MA followed by 2-MA). Undefined ends are NaN.
std::vector<double> centered_moving_average(std::span<const double> x, std::size_t m);

// Steps: trend by centered moving average; detrend; Loess-smooth each
// cycle-subseries (values sharing a phase); average per phase and center the
// profile to zero sum; residual = y - trend - seasonal.
StlDecomposition stl_decompose(std::span<const double> x, std::size_t period, std::size_t trend_window);

// Forecast for position `index` (relative to the decomposed span):
// last defined trend + profile[index mod period].
double stl_predict_at(const StlDecomposition& decomp, std::size_t index);
// Forecast for the point after `history`, which starts where the decomposed
// span starts.
double stl_predict_next(const StlDecomposition& decomp, std::span<const double> history);

// Compact forecasting state: a trend level and a seasonal profile anchored at
// a global sample index.
struct StlForecastState {
  double level = 0.0;
  std::vector<double> profile;
  std::size_t origin = 0;  // global index of the decomposed span's first point

  static StlForecastState from(const StlDecomposition& decomp, std::size_t origin);
  double predict(std::size_t global_index) const;
};

}  // namespace ens2::learners
