#pragma once

#include <cstdint>
#include <vector>

#include "ens2/core/series.hpp"

namespace ens2::core {

struct InjectedAnomaly {
  std::size_t index = 0;
  double magnitude = 0.0;
};

struct SyntheticOptions {
  std::size_t periods = 8;
  std::size_t period_len = 1440;
  double noise_sigma = 0.1;
  std::vector<InjectedAnomaly> anomalies;
  std::uint64_t seed = 42;
  std::int64_t start_timestamp = 0;
  std::int64_t interval = 60;
  std::string id = "synthetic";
};

// value_t = sin(2*pi*t / period_len) + N(0, noise_sigma) + injected magnitude.
// Labels are true exactly at the injected indices. Deterministic in the seed.
Series generate_synthetic(const SyntheticOptions& options);

// Draws `count` spike positions in [begin, end) at least `min_gap` apart, with
// magnitudes uniform in [min_magnitude, max_magnitude] and random sign.
std::vector<InjectedAnomaly> random_spikes(std::size_t count, std::size_t begin, std::size_t end,
                                           std::size_t min_gap, double min_magnitude,
                                           double max_magnitude, std::uint64_t seed);

}  // namespace ens2::core
