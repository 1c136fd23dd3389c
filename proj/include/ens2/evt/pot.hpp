#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>

#include <json.hpp>

#include "ens2/evt/gpd.hpp"

namespace ens2::evt {

enum class Verdict { normal, candidate, anomaly };
enum class GpdEstimator { lme, moments };

const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct PotConfig {
  double q = 0.99;        // quantile level of the alert threshold z; 1 - q is the target risk
  double theta = 0.95;    // quantile level of the peak threshold t
  std::size_t min_peaks = 10;
  bool sliding_t = false;              // re-derive t from a window of recent errors
  std::size_t sliding_window = 10000;
  std::size_t max_peaks = 10000;       // FIFO capacity of the peak set
  std::size_t max_anomalies = 10000;   // FIFO capacity of the recorded anomaly set
  GpdEstimator estimator = GpdEstimator::lme;
  double error_floor = 0.0;            // z never drops below this

  void validate() const;
};

// Detector state. Invariants once initialized: z >= t, every stored peak is
// > 0, and the peak count never exceeds n.
struct PotState {
  PotConfig config;
  bool initialized = false;
  double t = 0.0;            // peak threshold
  double z = 0.0;            // alert threshold
  double z_empirical = 0.0;  // training q-quantile, used while the peak set is small
  std::deque<double> peaks;  // excesses over t (candidate set)
  std::deque<std::pair<std::int64_t, double>> anomalies;  // (index, error)
  std::uint64_t n = 0;                // observations seen, training included
  std::uint64_t n_peaks_total = 0;    // peaks ever recorded, evictions included
  std::uint64_t n_anomalies_total = 0;
  std::optional<GpdParams> gpd;
  std::deque<double> recent;          // sliding_t only: recent non-anomalous errors
};

PotState pot_init(std::span<const double> train_errors, const PotConfig& config);

// One step of the detector:
//   e > z      -> anomaly, recorded; tail model untouched
//   t < e <= z -> candidate, excess stored, GPD re-fitted, z re-derived
//   otherwise  -> normal
// n increments in every branch.
Verdict pot_step(PotState& state, double error, std::int64_t index);

nlohmann::json to_json(const PotState& state);
PotState pot_state_from_json(const nlohmann::json& doc);

}  // namespace ens2::evt
