#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens2/core/series.hpp"
#include "ens2/core/stats.hpp"
#include "ens2/ensemble/config.hpp"
#include "ens2/ensemble/detection.hpp"
#include "ens2/evt/pot.hpp"
#include "ens2/learners/arima.hpp"
#include "ens2/learners/lstsvr.hpp"
#include "ens2/learners/stl.hpp"

namespace ens2::ensemble {

inline constexpr int kCheckpointVersion = 1;

// Fitted ensemble. Learners run on normalized values; predictions and errors
// are reported in the original units.
//
// Fitting uses the last contiguous run of the training series. The learners
// are fitted on its leading part and the rest is replayed through the online
// update schedule; the one-step errors of that replay initialize the
// detectors. Schedule, counted in points since that initial fit: STL is
// re-decomposed every `stl_period` points over the trailing
// `stl_max_periods` periods, LS-TSVR is re-solved every `refit_every` points
// over the trailing `lstsvr_train_rows` windows, ARIMA coefficients stay
// fixed and only its recursion advances. A missing-sample gap restarts the
// history and the next `warm_length()` points are reported as warming.
class EnsemblePipeline {
 public:
  static EnsemblePipeline fit(const core::Series& train, const EnsembleConfig& config);

  // Scores a test series that follows the training data. Recomputes every
  // forecast from the full history; the pipeline itself is not modified.
  // Available until the first stream_push.
  std::vector<Detection> detect_batch(const core::Series& test) const;
  bool batch_available() const noexcept { return !streamed_ && !fit_values_.empty(); }

  // Scores one point and advances the online state. A rejected point leaves
  // the state unchanged.
  Detection stream_push(const core::TimePoint& point);

  nlohmann::json checkpoint() const;
  static EnsemblePipeline restore(const nlohmann::json& doc);

  const EnsembleConfig& config() const noexcept { return config_; }
  const std::string& kpi_id() const noexcept { return kpi_id_; }
  const core::NormalizationParams& normalization() const noexcept { return norm_; }
  std::int64_t interval() const noexcept { return interval_; }
  std::int64_t last_timestamp() const noexcept { return last_ts_; }
  std::uint64_t steps() const noexcept { return steps_; }
  std::vector<std::string> learner_names() const;
  const evt::PotState& detector(const std::string& name) const;
  const std::map<std::string, evt::PotState>& detectors() const noexcept { return detectors_; }

 private:
  EnsemblePipeline() = default;

  struct Forecasts {
    std::optional<double> arima, stl, lstsvr;
  };

  struct Models {
    std::optional<learners::StlForecastState> stl;
    std::optional<learners::LsTsvrModel> lstsvr;
  };

  // Refreshes the models due at step k from the current contiguous history,
  // whose first value sits at global index `history_begin`.
  template <class Seq>
  void refresh_models(Models& models, std::uint64_t k, const Seq& history, std::int64_t history_begin) const;

  Detection score(std::int64_t index, const core::TimePoint& point, const Forecasts& forecasts,
                  std::map<std::string, evt::PotState>& detectors, std::optional<evt::PotState>& shared) const;
  std::int64_t global_index(std::int64_t timestamp) const;
  void check_next(std::int64_t timestamp, double value) const;
  std::size_t history_capacity() const;

  EnsembleConfig config_;
  std::string kpi_id_;
  std::int64_t interval_ = 1;
  std::int64_t ts0_ = 0;
  core::NormalizationParams norm_;

  std::int64_t last_ts_ = 0;
  std::uint64_t steps_ = 0;
  std::size_t segment_length_ = 0;
  std::deque<double> history_;  // trailing normalized values of the current run
  std::optional<learners::ArimaRecursion> arima_;
  Models models_;
  std::size_t lstsvr_min_rows_ = 2;
  std::map<std::string, evt::PotState> detectors_;
  std::optional<evt::PotState> shared_;

  // Kept for detect_batch: the normalized training run and its offsets.
  bool streamed_ = false;
  std::vector<double> fit_values_;
  std::int64_t fit_begin_index_ = 0;
  std::size_t fit_prefix_ = 0;
};

}  // namespace ens2::ensemble
