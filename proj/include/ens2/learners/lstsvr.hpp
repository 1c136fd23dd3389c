#pragma once

#include <span>

#include "ens2/learners/linalg.hpp"

namespace ens2::learners {

struct LsTsvrParams {
  KernelDescriptor kernel;
  double eps1 = 0.1;
  double eps2 = 0.1;
  // Kept for interface fidelity. Under the least-squares closed form both
  // penalties multiply the same residual, so the solution does not depend on them.
  double c1 = 1.0;
  double c2 = 1.0;
};

struct LsTsvrModel {
  Matrix support_inputs;  // training windows, one per row
  Vector omega1;
  Vector omega2;
  double b1 = 0.0;
  double b2 = 0.0;
  double eps1 = 0.0;
  double eps2 = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  KernelDescriptor kernel;

  std::size_t window() const noexcept { return static_cast<std::size_t>(support_inputs.cols()); }
};

// With G = [K(X, X^T) e]:
//   [omega1; b1] = G^+ (Y - eps1 e)   (down-bound regressor)
//   [omega2; b2] = G^+ (Y + eps2 e)   (up-bound regressor)
LsTsvrModel lstsvr_fit(const Matrix& x, const Vector& y, const LsTsvrParams& params);

// f(x) = 1/2 K(x, X^T)(omega1 + omega2) + 1/2 (b1 + b2)
double lstsvr_predict(const LsTsvrModel& model, std::span<const double> window);

struct LagWindows {
  Matrix x;  // rows = windows of `window` consecutive values
  Vector y;  // value following each window
};

// The most recent up-to-`max_rows` lag windows of a contiguous series.
LagWindows make_lag_windows(std::span<const double> values, std::size_t window, std::size_t max_rows);

// 1 / (window * variance of the window entries).
double default_rbf_gamma(const Matrix& x);

}  // namespace ens2::learners
