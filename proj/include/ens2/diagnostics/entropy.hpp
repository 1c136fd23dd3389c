#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ens2/core/series.hpp"

namespace ens2::diagnostics {

// Normalized permutation entropy of each sliding window, aligned to the
// window's last sample: values[i] covers x[i, i + window).
struct EntropyProfile {
  std::size_t window = 0;
  std::size_t order = 0;
  std::vector<double> values;
};

// Index of the ordinal pattern of `order` consecutive samples starting at
// x[start]. Equal values rank by position, the earlier one smaller.
std::size_t ordinal_pattern(std::span<const double> x, std::size_t start, std::size_t order);

// H = -sum p ln p / ln(order!) over the ordinal patterns of each window.
// Requires 2 <= order <= 7, window >= order * order! and x.size() >= window.
EntropyProfile permutation_entropy(std::span<const double> x, std::size_t order, std::size_t window);

struct OverlayRow {
  std::int64_t timestamp = 0;
  double value = 0.0;
  double entropy = 0.0;
};

// Rows for points window-1 .. n-1, each carrying the entropy of the window
// ending there.
std::vector<OverlayRow> entropy_overlay(const core::Series& series, const EntropyProfile& profile);
void write_overlay_csv(std::ostream& out, const std::vector<OverlayRow>& rows);

}  // namespace ens2::diagnostics
