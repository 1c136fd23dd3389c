#include "ens2/learners/forecaster.hpp"

#include "ens2/common/error.hpp"

namespace ens2::learners {

double ArimaForecaster::predict_next(std::span<const double> history) const {
  return arima_predict_next(model_, history);
}

void StlForecaster::fit(std::span<const double> train) {
  decomp_ = stl_decompose(train, period_, trend_window_);
}

double StlForecaster::predict_next(std::span<const double> history) const {
  return stl_predict_next(decomp_, history);
}

void LsTsvrForecaster::fit(std::span<const double> train) {
  const auto lags = make_lag_windows(train, window_, max_rows_);
  auto params = params_;
  if (params.kernel.kind == KernelKind::rbf && !(params.kernel.gamma > 0.0)) {
    params.kernel.gamma = default_rbf_gamma(lags.x);
  }
  model_ = lstsvr_fit(lags.x, lags.y, params);
}

double LsTsvrForecaster::predict_next(std::span<const double> history) const {
  if (history.size() < window_) throw InvalidArgument("lstsvr: history shorter than the window");
  return lstsvr_predict(model_, history.subspan(history.size() - window_));
}

std::vector<double> one_step_forecasts(const Forecaster& f, std::span<const double> values, std::size_t start) {
  std::vector<double> out;
  out.reserve(values.size() > start ? values.size() - start : 0);
  for (std::size_t t = start; t < values.size(); ++t) out.push_back(f.predict_next(values.first(t)));
  return out;
}

}  // namespace ens2::learners
