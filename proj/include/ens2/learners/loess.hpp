#pragma once

#include <span>
#include <vector>

namespace ens2::learners {

// Tri-cubic weight (1 - delta^3)^3 for a normalized distance delta in [0, 1].
double tricube(double delta);

// Local polynomial smoothing. Each output point is the weighted least-squares
// fit (degree 0 or 1) over its k nearest neighbours by index distance,
// evaluated at that point. Distances within a neighbourhood are normalized as
// (d - min) / (max - min) before weighting, so the farthest neighbour gets
// weight 0. A degree-1 fit that is singular under these weights falls back to
// the weighted mean.
std::vector<double> loess_smooth(std::span<const double> x, std::size_t k, int degree);

}  // namespace ens2::learners
