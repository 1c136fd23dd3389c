#include "ens2/learners/loess.hpp"

#include <algorithm>
#include <cmath>

#include "ens2/common/error.hpp"

namespace ens2::learners {

double tricube(double delta) {
  const double d = std::clamp(delta, 0.0, 1.0);
  const double u = 1.0 - d * d * d;
  return u * u * u;
}

std::vector<double> loess_smooth(std::span<const double> x, std::size_t k, int degree) {
  if (degree != 0 && degree != 1) throw InvalidArgument("loess: degree must be 0 or 1");
  if (k > x.size()) throw InvalidArgument("loess: k exceeds series length");
  if (k < static_cast<std::size_t>(degree) + 1) throw InvalidArgument("loess: k too small for degree");

  const std::size_t n = x.size();
  std::vector<double> out(n);
  std::vector<double> w(k);
  for (std::size_t i = 0; i < n; ++i) {
    // k nearest indices: a window of k containing i, as centered as the ends allow.
    const std::size_t half = (k - 1) / 2;
    std::size_t lo = i >= half ? i - half : 0;
    lo = std::min(lo, n - k);

    double dmax = 0.0;
    for (std::size_t j = lo; j < lo + k; ++j) {
      dmax = std::max(dmax, std::abs(static_cast<double>(j) - static_cast<double>(i)));
    }
    // The point itself is always in its neighbourhood, so the minimum distance is 0.
    double sw = 0.0, swt = 0.0, swtt = 0.0, swy = 0.0, swty = 0.0;
    for (std::size_t j = lo; j < lo + k; ++j) {
      const double t = static_cast<double>(j) - static_cast<double>(i);
      const double wj = dmax > 0.0 ? tricube(std::abs(t) / dmax) : 1.0;
      sw += wj;
      swt += wj * t;
      swtt += wj * t * t;
      swy += wj * x[j];
      swty += wj * t * x[j];
    }

    double fit = swy / sw;
    if (degree == 1) {
      // Local line a + b t centred at t = 0, so the fitted value is a.
      const double det = sw * swtt - swt * swt;
      if (det > 1e-12 * sw * swtt) fit = (swtt * swy - swt * swty) / det;
    }
    out[i] = fit;
  }
  return out;
}

}  // namespace ens2::learners
