#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ens2/evt/pot.hpp"
#include "ens2/learners/arima.hpp"
#include "ens2/learners/lstsvr.hpp"

namespace ens2::ensemble {

enum class LearnerKind { arima, stl, lstsvr };
enum class VoteMode { majority, error_average };

const char* to_string(LearnerKind k);
LearnerKind learner_from_string(const std::string& s);
const char* to_string(VoteMode m);
VoteMode vote_mode_from_string(const std::string& s);

struct EnsembleConfig {
  std::vector<LearnerKind> learners{LearnerKind::arima, LearnerKind::stl, LearnerKind::lstsvr};
  VoteMode vote_mode = VoteMode::majority;
  // Learners that must flag a point. 0 picks a strict majority, |learners| / 2 + 1.
  std::size_t vote_threshold = 0;
  std::size_t window = 60;
  bool normalize_input = true;
  evt::PotConfig pot;
  // Lower bound for every alert threshold, in normalized units (scaled by the
  // training sigma). Keeps rounding-level errors on noise-free input quiet.
  double min_error = 1e-6;

  learners::ArimaOrder arima;
  learners::SingularPolicy arima_singular = learners::SingularPolicy::min_norm;
  std::size_t stl_period = 1440;
  std::size_t stl_trend_window = 0;  // 0: same as the period
  std::size_t stl_max_periods = 8;   // decomposition span, in periods
  learners::LsTsvrParams lstsvr{{learners::KernelKind::linear, 0.0}};  // rbf gamma 0: chosen from the data
  std::size_t lstsvr_train_rows = 500;
  std::size_t refit_every = 1440;

  void validate() const;

  bool uses(LearnerKind k) const;
  std::size_t effective_vote_threshold() const;
  std::size_t effective_trend_window() const;
  // Contiguous history a point needs before it can be scored.
  std::size_t warm_length() const;
  // Shortest contiguous span the learners can be fitted on.
  std::size_t min_fit_length() const;
};

nlohmann::json to_json(const EnsembleConfig& config);
EnsembleConfig config_from_json(const nlohmann::json& doc);

}  // namespace ens2::ensemble
