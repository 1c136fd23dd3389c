#pragma once

#include <deque>
#include <optional>
#include <span>
#include <vector>

namespace ens2::learners {

struct ArimaOrder {
  std::size_t p = 5;
  std::size_t d = 1;
  std::size_t q = 0;
};

// (1 - phi_1 B - ... - phi_p B^p)(1 - B)^d y_t = c + (1 + theta_1 B + ... + theta_q B^q) e_t
struct ArimaModel {
  std::size_t p = 0;
  std::size_t d = 0;
  std::size_t q = 0;
  std::vector<double> phi;    // phi_1..phi_p
  std::vector<double> theta;  // theta_1..theta_q
  double c = 0.0;
  std::vector<double> recent_residuals;  // last q residuals of the training recursion, oldest first
};

// Applies first differencing d times. Output length = input length - d.
std::vector<double> difference(std::span<const double> x, std::size_t d);
// Inverse of difference(): `head` holds the first d values of the original series.
std::vector<double> integrate_back(std::span<const double> diffs, std::span<const double> head);

// What arima_fit does when a lag regression is rank deficient (for example
// an over-parameterized order on an exactly periodic series): raise a
// ComputeError, or take the minimum-norm least-squares solution.
enum class SingularPolicy { error, min_norm };

// Hannan-Rissanen estimation: a long autoregression supplies residual
// proxies, then the differenced series is regressed on p own lags and q
// residual lags (plus a constant). With q = 0 this is ordinary least squares
// on the lags.
ArimaModel arima_fit(std::span<const double> train, ArimaOrder order,
                     SingularPolicy policy = SingularPolicy::error);

// Rolls the ARIMA recursion forward one observation at a time. Residuals are
// zero until p + d values have been seen.
class ArimaRecursion {
 public:
  explicit ArimaRecursion(ArimaModel model);

  const ArimaModel& model() const noexcept { return model_; }

  bool ready() const noexcept { return pending_.has_value(); }
  // One-step forecast on the original scale. Requires ready().
  double forecast() const;
  void observe(double y);

  const std::deque<double>& tail() const noexcept { return tail_; }
  const std::deque<double>& residuals() const noexcept { return residuals_; }
  // Restores a recursion from its serialized tail and residuals.
  static ArimaRecursion restore(ArimaModel model, std::vector<double> tail,
                                std::vector<double> residuals);

 private:
  void refresh_pending();

  ArimaModel model_;
  std::deque<double> tail_;       // last max(p + d, d + 1) observations
  std::deque<double> residuals_;  // last q residuals, oldest first
  std::optional<double> pending_; // forecast of the next differenced value
};

// One-step forecast of the value following `history` (contiguous, oldest
// first). The residual recursion is replayed over the whole history when q > 0.
double arima_predict_next(const ArimaModel& model, std::span<const double> history);

// In-sample one-step absolute errors |y_t - yhat_t| for every t at which the
// recursion can forecast, paired with the index t.
std::vector<std::pair<std::size_t, double>> arima_in_sample_errors(const ArimaModel& model,
                                                                   std::span<const double> train);

}  // namespace ens2::learners
