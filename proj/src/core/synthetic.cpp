#include "ens2/core/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "ens2/common/error.hpp"

namespace ens2::core {

Series generate_synthetic(const SyntheticOptions& o) {
  if (o.periods < 1) throw InvalidArgument("synthetic: periods must be >= 1");
  if (o.period_len < 4) throw InvalidArgument("synthetic: period_len must be >= 4");
  if (!(o.noise_sigma >= 0.0)) throw InvalidArgument("synthetic: noise_sigma must be >= 0");
  const std::size_t n = o.periods * o.period_len;

  std::set<std::size_t> seen;
  for (const auto& a : o.anomalies) {
    if (a.index >= n) {
      throw InvalidArgument("synthetic: anomaly index " + std::to_string(a.index) +
                            " out of range (length " + std::to_string(n) + ")");
    }
    if (!seen.insert(a.index).second) {
      throw InvalidArgument("synthetic: duplicate anomaly index " + std::to_string(a.index));
    }
  }

  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<TimePoint> pts(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t) / static_cast<double>(o.period_len);
    pts[t].timestamp = o.start_timestamp + static_cast<std::int64_t>(t) * o.interval;
    pts[t].value = std::sin(phase) + o.noise_sigma * noise(rng);
    pts[t].label = false;
  }
  for (const auto& a : o.anomalies) {
    pts[a.index].value += a.magnitude;
    pts[a.index].label = true;
  }
  return Series(o.id, std::move(pts), o.interval);
}

std::vector<InjectedAnomaly> random_spikes(std::size_t count, std::size_t begin, std::size_t end,
                                           std::size_t min_gap, double min_magnitude,
                                           double max_magnitude, std::uint64_t seed) {
  if (begin >= end) throw InvalidArgument("random_spikes: empty range");
  if (min_magnitude > max_magnitude) throw InvalidArgument("random_spikes: min > max magnitude");
  if (count > 0 && (end - begin) < (count - 1) * min_gap + 1) {
    throw InvalidArgument("random_spikes: range too small for the requested spacing");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pos(begin, end - 1);
  std::uniform_real_distribution<double> mag(min_magnitude, max_magnitude);
  std::vector<InjectedAnomaly> out;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > 1000000) throw InvalidArgument("random_spikes: could not place spikes");
    const std::size_t idx = pos(rng);
    const bool clash = std::any_of(out.begin(), out.end(), [&](const InjectedAnomaly& a) {
      const auto d = idx > a.index ? idx - a.index : a.index - idx;
      return d < std::max<std::size_t>(min_gap, 1);
    });
    if (clash) continue;
    const double sign = (rng() & 1U) ? 1.0 : -1.0;
    out.push_back({idx, sign * mag(rng)});
  }
  std::sort(out.begin(), out.end(),
            [](const InjectedAnomaly& a, const InjectedAnomaly& b) { return a.index < b.index; });
  return out;
}

}  // namespace ens2::core
