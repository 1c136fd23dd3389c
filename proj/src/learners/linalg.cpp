#include "ens2/learners/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ens2/common/error.hpp"

namespace ens2::learners {

Matrix moore_penrose_pinv(const Matrix& a, double rel_tol) {
  if (a.size() == 0) return Matrix(a.cols(), a.rows());
  if (!a.allFinite()) throw ComputeError("pinv: matrix has non-finite entries");

  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw ComputeError("pinv: SVD did not converge");

  const Vector& s = svd.singularValues();
  const double cutoff =
      rel_tol * static_cast<double>(std::max(a.rows(), a.cols())) * (s.size() > 0 ? s(0) : 0.0);
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

namespace {

double relative(const Matrix& residual, const Matrix& reference) {
  const double ref = reference.norm();
  return ref > 0.0 ? residual.norm() / ref : residual.norm();
}

}  // namespace

double PenroseResiduals::max() const { return std::max({axa, xax, xa_symmetric, ax_symmetric}); }

PenroseResiduals penrose_residuals(const Matrix& a, const Matrix& x) {
  const Matrix xa = x * a;
  const Matrix ax = a * x;
  PenroseResiduals r;
  r.axa = relative(a * x * a - a, a);
  r.xax = relative(x * a * x - x, x);
  r.xa_symmetric = relative(xa.transpose() - xa, xa);
  r.ax_symmetric = relative(ax.transpose() - ax, ax);
  return r;
}

double kernel_value(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z,
                    const KernelDescriptor& kernel) {
  switch (kernel.kind) {
    case KernelKind::linear:
      return x.dot(z);
    case KernelKind::rbf:
      return std::exp(-kernel.gamma * (x - z).squaredNorm());
  }
  return 0.0;
}

Matrix kernel_matrix(const Matrix& x, const Matrix& z, const KernelDescriptor& kernel) {
  if (x.cols() != z.cols()) {
    throw InvalidArgument("kernel_matrix: feature dimensions differ (" + std::to_string(x.cols()) +
                          " vs " + std::to_string(z.cols()) + ")");
  }
  if (kernel.kind == KernelKind::rbf && !(kernel.gamma > 0.0)) {
    throw InvalidArgument("kernel_matrix: rbf gamma must be positive");
  }
  if (kernel.kind == KernelKind::linear) return x * z.transpose();

  const Vector xn = x.rowwise().squaredNorm();
  const Vector zn = z.rowwise().squaredNorm();
  Matrix k = x * z.transpose();
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      const double d2 = std::max(0.0, xn(i) + zn(j) - 2.0 * k(i, j));
      k(i, j) = std::exp(-kernel.gamma * d2);
    }
  }
  return k;
}

}  // namespace ens2::learners
