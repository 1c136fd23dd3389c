#pragma once

#include <Eigen/Dense>
#include <span>

namespace ens2::learners {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Singular values below rel_tol * max(rows, cols) * sigma_max are treated as zero.
inline constexpr double kPinvRelTol = 1e-12;

// Moore-Penrose generalized inverse via SVD. Throws ComputeError on
// non-finite input or SVD failure.
Matrix moore_penrose_pinv(const Matrix& a, double rel_tol = kPinvRelTol);

// Relative Frobenius residuals of the four Penrose conditions for X ~ A^+:
// |AXA - A|/|A|, |XAX - X|/|X|, |(XA)^T - XA|/|XA|, |(AX)^T - AX|/|AX|.
struct PenroseResiduals {
  double axa = 0.0;
  double xax = 0.0;
  double xa_symmetric = 0.0;
  double ax_symmetric = 0.0;
  double max() const;
};
PenroseResiduals penrose_residuals(const Matrix& a, const Matrix& x);

enum class KernelKind { linear, rbf };

struct KernelDescriptor {
  KernelKind kind = KernelKind::linear;
  double gamma = 1.0;  // rbf only: k(x, z) = exp(-gamma |x - z|^2)
};

double kernel_value(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& z,
                    const KernelDescriptor& kernel);

// Entry (i, j) = kernel(row i of x, row j of z).
Matrix kernel_matrix(const Matrix& x, const Matrix& z, const KernelDescriptor& kernel);

}  // namespace ens2::learners
