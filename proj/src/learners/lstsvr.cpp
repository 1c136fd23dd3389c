#include "ens2/learners/lstsvr.hpp"

#include <algorithm>
#include <cmath>

#include "ens2/common/error.hpp"

namespace ens2::learners {

LsTsvrModel lstsvr_fit(const Matrix& x, const Vector& y, const LsTsvrParams& params) {
  if (x.rows() != y.size()) throw InvalidArgument("lstsvr_fit: rows(X) != length(Y)");
  if (x.rows() < 2) throw InvalidArgument("lstsvr_fit: need at least 2 training rows");
  if (!x.allFinite() || !y.allFinite()) throw InvalidArgument("lstsvr_fit: non-finite training data");
  if (params.eps1 < 0.0 || params.eps2 < 0.0) throw InvalidArgument("lstsvr_fit: tube parameters must be >= 0");
  if (!(params.c1 > 0.0) || !(params.c2 > 0.0)) throw InvalidArgument("lstsvr_fit: penalties must be > 0");

  const Eigen::Index n = x.rows();
  Matrix g(n, n + 1);
  g.leftCols(n) = kernel_matrix(x, x, params.kernel);
  g.col(n).setOnes();
  const Matrix g_pinv = moore_penrose_pinv(g);

  const Vector u1 = g_pinv * (y - Vector::Constant(n, params.eps1));
  const Vector u2 = g_pinv * (y + Vector::Constant(n, params.eps2));

  LsTsvrModel m;
  m.support_inputs = x;
  m.omega1 = u1.head(n);
  m.omega2 = u2.head(n);
  m.b1 = u1(n);
  m.b2 = u2(n);
  m.eps1 = params.eps1;
  m.eps2 = params.eps2;
  m.c1 = params.c1;
  m.c2 = params.c2;
  m.kernel = params.kernel;
  return m;
}

double lstsvr_predict(const LsTsvrModel& model, std::span<const double> window) {
  if (window.size() != model.window()) {
    throw InvalidArgument("lstsvr_predict: window length " + std::to_string(window.size()) +
                          " != model window " + std::to_string(model.window()));
  }
  const Eigen::Map<const Vector> x(window.data(), static_cast<Eigen::Index>(window.size()));
  double k_omega = 0.0;
  for (Eigen::Index i = 0; i < model.support_inputs.rows(); ++i) {
    const double k = kernel_value(x, model.support_inputs.row(i).transpose(), model.kernel);
    k_omega += k * (model.omega1(i) + model.omega2(i));
  }
  return 0.5 * k_omega + 0.5 * (model.b1 + model.b2);
}

LagWindows make_lag_windows(std::span<const double> values, std::size_t window, std::size_t max_rows) {
  if (window == 0) throw InvalidArgument("lag windows: window must be >= 1");
  if (values.size() <= window) throw InvalidArgument("lag windows: series not longer than the window");
  const std::size_t available = values.size() - window;
  const std::size_t rows = std::min(available, max_rows);
  const std::size_t first = available - rows;  // target index = first + window + r
  LagWindows out;
  out.x.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(window));
  out.y.resize(static_cast<Eigen::Index>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t start = first + r;
    for (std::size_t c = 0; c < window; ++c) out.x(r, c) = values[start + c];
    out.y(r) = values[start + window];
  }
  return out;
}

double default_rbf_gamma(const Matrix& x) {
  const double m = x.mean();
  const double var = (x.array() - m).square().mean();
  if (!(var > 0.0)) return 1.0 / static_cast<double>(std::max<Eigen::Index>(x.cols(), 1));
  return 1.0 / (static_cast<double>(x.cols()) * var);
}

}  // namespace ens2::learners
