#include "ens2/diagnostics/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "ens2/common/error.hpp"
#include "ens2/core/csv.hpp"

namespace ens2::diagnostics {
namespace {

std::size_t factorial(std::size_t n) {
  std::size_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

std::size_t ordinal_pattern(std::span<const double> x, std::size_t start, std::size_t order) {
  if (order < 2 || order > 7) throw InvalidArgument("ordinal pattern order must be in [2, 7]");
  if (start + order > x.size()) throw InvalidArgument("ordinal pattern runs past the end of the data");
  std::size_t idx[7];
  std::iota(idx, idx + order, std::size_t{0});
  std::stable_sort(idx, idx + order, [&](std::size_t a, std::size_t b) { return x[start + a] < x[start + b]; });
  // Lehmer code of the rank permutation.
  std::size_t code = 0;
  for (std::size_t i = 0; i < order; ++i) {
    std::size_t smaller = 0;
    for (std::size_t j = i + 1; j < order; ++j) smaller += idx[j] < idx[i];
    code = code * (order - i) + smaller;
  }
  return code;
}

EntropyProfile permutation_entropy(std::span<const double> x, std::size_t order, std::size_t window) {
  if (order < 2 || order > 7) throw InvalidArgument("permutation entropy: order must be in [2, 7]");
  const std::size_t patterns = factorial(order);
  if (window < order * patterns) {
    throw InvalidArgument("permutation entropy: window " + std::to_string(window) + " is shorter than order * order! = " +
                          std::to_string(order * patterns));
  }
  if (x.size() < window) throw InvalidArgument("permutation entropy: series shorter than the window");

  std::vector<std::size_t> code(x.size() - order + 1);
  for (std::size_t s = 0; s < code.size(); ++s) code[s] = ordinal_pattern(x, s, order);

  const std::size_t per_window = window - order + 1;
  const double norm = std::log(static_cast<double>(patterns));
  std::vector<std::size_t> counts(patterns, 0);
  for (std::size_t s = 0; s < per_window; ++s) ++counts[code[s]];

  EntropyProfile out{window, order, {}};
  out.values.reserve(x.size() - window + 1);
  for (std::size_t w = 0;; ++w) {
    double h = 0.0;
    for (std::size_t c : counts) {
      if (c == 0) continue;
      const double p = static_cast<double>(c) / static_cast<double>(per_window);
      h -= p * std::log(p);
    }
    out.values.push_back(std::clamp(h / norm, 0.0, 1.0));
    if (w + window >= x.size()) break;
    --counts[code[w]];
    ++counts[code[w + per_window]];
  }
  return out;
}

std::vector<OverlayRow> entropy_overlay(const core::Series& series, const EntropyProfile& profile) {
  if (profile.window == 0 || series.size() < profile.window ||
      profile.values.size() != series.size() - profile.window + 1) {
    throw InvalidArgument("entropy overlay: profile does not align with the series");
  }
  std::vector<OverlayRow> rows;
  rows.reserve(profile.values.size());
  for (std::size_t i = 0; i < profile.values.size(); ++i) {
    const auto& p = series[i + profile.window - 1];
    rows.push_back({p.timestamp, p.value, profile.values[i]});
  }
  return rows;
}

void write_overlay_csv(std::ostream& out, const std::vector<OverlayRow>& rows) {
  out << "timestamp,value,entropy\n";
  for (const auto& r : rows) {
    out << r.timestamp << ',' << core::format_double(r.value) << ',' << core::format_double(r.entropy) << '\n';
  }
}

}  // namespace ens2::diagnostics
