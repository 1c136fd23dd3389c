#include "ens2/learners/arima.hpp"

#include <algorithm>
#include <cmath>

#include "ens2/common/error.hpp"
#include "ens2/learners/linalg.hpp"

namespace ens2::learners {

std::vector<double> difference(std::span<const double> x, std::size_t d) {
  if (x.size() <= d) {
    throw InvalidArgument("difference: length " + std::to_string(x.size()) + " <= d = " + std::to_string(d));
  }
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t level = 0; level < d; ++level) {
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = cur[i + 1] - cur[i];
    cur.pop_back();
  }
  return cur;
}

std::vector<double> integrate_back(std::span<const double> diffs, std::span<const double> head) {
  const std::size_t d = head.size();
  // starts[j] = first value of the j-th difference of the original series.
  std::vector<double> starts(d);
  std::vector<double> cur(head.begin(), head.end());
  for (std::size_t j = 0; j < d; ++j) {
    starts[j] = cur.front();
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) cur[i] = cur[i + 1] - cur[i];
    cur.pop_back();
  }
  std::vector<double> out(diffs.begin(), diffs.end());
  for (std::size_t j = d; j-- > 0;) {
    std::vector<double> up(out.size() + 1);
    up[0] = starts[j];
    for (std::size_t i = 0; i < out.size(); ++i) up[i + 1] = up[i] + out[i];
    out = std::move(up);
  }
  return out;
}

namespace {

constexpr double kRankThreshold = 1e-10;

// Least squares with an explicit rank check.
Vector solve_least_squares(const Matrix& a, const Vector& b, SingularPolicy policy) {
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < a.cols()) {
    if (policy == SingularPolicy::min_norm) {
      Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
      cod.setThreshold(kRankThreshold);
      return cod.solve(b);
    }
    throw ComputeError("arima: singular regression system (rank " + std::to_string(qr.rank()) + " < " +
                       std::to_string(a.cols()) + ")");
  }
  return qr.solve(b);
}

// AR(order) with constant by least squares; returns residuals aligned to w
// (zero for the first `order` entries).
std::vector<double> long_ar_residuals(const std::vector<double>& w, std::size_t order, SingularPolicy policy) {
  const std::size_t rows = w.size() - order;
  Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(order + 1));
  Vector b(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + order;
    a(r, 0) = 1.0;
    for (std::size_t i = 1; i <= order; ++i) a(r, i) = w[t - i];
    b(r) = w[t];
  }
  const Vector coef = solve_least_squares(a, b, policy);
  std::vector<double> resid(w.size(), 0.0);
  for (std::size_t r = 0; r < rows; ++r) resid[r + order] = b(r) - a.row(r).dot(coef);
  return resid;
}

}  // namespace

ArimaModel arima_fit(std::span<const double> train, ArimaOrder order, SingularPolicy policy) {
  const auto [p, d, q] = order;
  if (train.size() < p + q + d + 20) {
    throw InvalidArgument("arima_fit: need at least p + q + d + 20 = " + std::to_string(p + q + d + 20) +
                          " points, got " + std::to_string(train.size()));
  }
  ArimaModel m;
  m.p = p;
  m.d = d;
  m.q = q;
  m.phi.assign(p, 0.0);
  m.theta.assign(q, 0.0);

  const auto w = difference(train, d);
  const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
  if (*lo == *hi) {
    // Differencing left a constant: no dynamics to estimate.
    m.c = *lo;
  } else {
    std::vector<double> proxy;
    std::size_t first = p;
    if (q > 0) {
      const std::size_t long_order = std::max<std::size_t>(std::min<std::size_t>(20, w.size() / 10), p + q);
      if (w.size() <= 2 * long_order + q + 1) throw InvalidArgument("arima_fit: too few points for q > 0");
      proxy = long_ar_residuals(w, long_order, policy);
      first = std::max(p, long_order + q);
    }
    const std::size_t rows = w.size() - first;
    const std::size_t cols = 1 + p + q;
    if (rows < cols) throw InvalidArgument("arima_fit: too few points for the requested orders");
    Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    Vector b(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t t = r + first;
      a(r, 0) = 1.0;
      for (std::size_t i = 1; i <= p; ++i) a(r, i) = w[t - i];
      for (std::size_t j = 1; j <= q; ++j) a(r, p + j) = proxy[t - j];
      b(r) = w[t];
    }
    const Vector coef = solve_least_squares(a, b, policy);
    m.c = coef(0);
    for (std::size_t i = 0; i < p; ++i) m.phi[i] = coef(1 + i);
    for (std::size_t j = 0; j < q; ++j) m.theta[j] = coef(1 + p + j);
  }

  ArimaRecursion rec(m);
  for (double y : train) rec.observe(y);
  m.recent_residuals.assign(rec.residuals().begin(), rec.residuals().end());
  return m;
}

ArimaRecursion::ArimaRecursion(ArimaModel model) : model_(std::move(model)) {
  residuals_.assign(model_.q, 0.0);
}

ArimaRecursion ArimaRecursion::restore(ArimaModel model, std::vector<double> tail,
                                       std::vector<double> residuals) {
  ArimaRecursion r(std::move(model));
  if (residuals.size() != r.model_.q) throw DataError("arima state: residual count mismatch");
  r.tail_.assign(tail.begin(), tail.end());
  r.residuals_.assign(residuals.begin(), residuals.end());
  r.refresh_pending();
  return r;
}

namespace {

// d-th difference at the end of `vals` (needs d + 1 trailing values), computed
// by the same nested pairwise scheme as difference().
double diff_at(const std::deque<double>& vals, std::size_t end, std::size_t d) {
  double buf[16];
  std::vector<double> big;
  double* cur = buf;
  if (d + 1 > 16) {
    big.resize(d + 1);
    cur = big.data();
  }
  for (std::size_t i = 0; i <= d; ++i) cur[i] = vals[end - d + i];
  for (std::size_t level = 0; level < d; ++level) {
    for (std::size_t i = 0; i + 1 < d + 1 - level; ++i) cur[i] = cur[i + 1] - cur[i];
  }
  return cur[0];
}

}  // namespace

void ArimaRecursion::refresh_pending() {
  const std::size_t p = model_.p, d = model_.d;
  if (tail_.size() < p + d || tail_.empty()) {
    pending_.reset();
    return;
  }
  const std::size_t last = tail_.size() - 1;
  double w_hat = model_.c;
  for (std::size_t i = 1; i <= p; ++i) w_hat += model_.phi[i - 1] * diff_at(tail_, last + 1 - i, d);
  for (std::size_t j = 1; j <= model_.q; ++j) w_hat += model_.theta[j - 1] * residuals_[model_.q - j];
  pending_ = w_hat;
}

double ArimaRecursion::forecast() const {
  if (!pending_) throw InvalidArgument("arima: history too short to forecast");
  // yhat_{t+1} = what_{t+1} + sum_{j<d} (j-th difference at t)
  double y_hat = *pending_;
  const std::size_t last = tail_.size() - 1;
  for (std::size_t j = model_.d; j-- > 0;) y_hat += diff_at(tail_, last, j);
  return y_hat;
}

void ArimaRecursion::observe(double y) {
  const std::size_t d = model_.d;
  tail_.push_back(y);
  const std::size_t keep = std::max(model_.p + d, d + 1);
  while (tail_.size() > keep) tail_.pop_front();
  if (model_.q > 0) {
    double e = 0.0;
    if (pending_ && tail_.size() >= d + 1) e = diff_at(tail_, tail_.size() - 1, d) - *pending_;
    residuals_.push_back(e);
    residuals_.pop_front();
  }
  refresh_pending();
}

double arima_predict_next(const ArimaModel& model, std::span<const double> history) {
  if (history.size() < model.p + model.d || history.empty()) {
    throw InvalidArgument("arima_predict_next: history shorter than p + d");
  }
  ArimaRecursion rec(model);
  // Without MA terms the forecast depends only on the last p + d values.
  const std::size_t keep = std::max(model.p + model.d, model.d + 1);
  const std::size_t start = (model.q == 0 && history.size() > keep) ? history.size() - keep : 0;
  for (std::size_t i = start; i < history.size(); ++i) rec.observe(history[i]);
  return rec.forecast();
}

std::vector<std::pair<std::size_t, double>> arima_in_sample_errors(const ArimaModel& model,
                                                                   std::span<const double> train) {
  std::vector<std::pair<std::size_t, double>> out;
  ArimaRecursion rec(model);
  for (std::size_t t = 0; t < train.size(); ++t) {
    if (rec.ready()) out.emplace_back(t, std::abs(train[t] - rec.forecast()));
    rec.observe(train[t]);
  }
  return out;
}

}  // namespace ens2::learners
