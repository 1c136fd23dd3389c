#pragma once

#include <memory>
#include <span>
#include <string_view>

#include "ens2/learners/arima.hpp"
#include "ens2/learners/lstsvr.hpp"
#include "ens2/learners/stl.hpp"

namespace ens2::learners {

// Common one-step forecaster contract. `history` passed to predict_next is
// contiguous and starts at the same sample as the training span given to fit.
class Forecaster {
 public:
  virtual ~Forecaster() = default;
  virtual std::string_view name() const = 0;
  virtual void fit(std::span<const double> train) = 0;
  virtual double predict_next(std::span<const double> history) const = 0;
};

class ArimaForecaster final : public Forecaster {
 public:
  explicit ArimaForecaster(ArimaOrder order = {}) : order_(order) {}
  std::string_view name() const override { return "arima"; }
  void fit(std::span<const double> train) override { model_ = arima_fit(train, order_); }
  double predict_next(std::span<const double> history) const override;
  const ArimaModel& model() const noexcept { return model_; }

 private:
  ArimaOrder order_;
  ArimaModel model_;
};

class StlForecaster final : public Forecaster {
 public:
  StlForecaster(std::size_t period, std::size_t trend_window) : period_(period), trend_window_(trend_window) {}
  std::string_view name() const override { return "stl"; }
  void fit(std::span<const double> train) override;
  double predict_next(std::span<const double> history) const override;
  const StlDecomposition& decomposition() const noexcept { return decomp_; }

 private:
  std::size_t period_;
  std::size_t trend_window_;
  StlDecomposition decomp_;
};

class LsTsvrForecaster final : public Forecaster {
 public:
  LsTsvrForecaster(std::size_t window, std::size_t max_rows, LsTsvrParams params)
      : window_(window), max_rows_(max_rows), params_(params) {}
  std::string_view name() const override { return "lstsvr"; }
  // A zero (auto) rbf gamma is resolved from the training windows.
  void fit(std::span<const double> train) override;
  double predict_next(std::span<const double> history) const override;
  const LsTsvrModel& model() const noexcept { return model_; }

 private:
  std::size_t window_;
  std::size_t max_rows_;
  LsTsvrParams params_;
  LsTsvrModel model_;
};

// One-step forecasts for positions [start, values.size()), each made from
// values[0, t).
std::vector<double> one_step_forecasts(const Forecaster& f, std::span<const double> values, std::size_t start);

}  // namespace ens2::learners
