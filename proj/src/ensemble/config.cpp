#include "ens2/ensemble/config.hpp"

#include <algorithm>
#include <cmath>

#include "ens2/common/error.hpp"

namespace ens2::ensemble {

const char* to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::arima: return "arima";
    case LearnerKind::stl: return "stl";
    case LearnerKind::lstsvr: return "lstsvr";
  }
  return "arima";
}

LearnerKind learner_from_string(const std::string& s) {
  if (s == "arima") return LearnerKind::arima;
  if (s == "stl") return LearnerKind::stl;
  if (s == "lstsvr" || s == "ls-tsvr") return LearnerKind::lstsvr;
  throw ConfigError("unknown learner '" + s + "' (expected arima, stl or lstsvr)");
}

const char* to_string(VoteMode m) { return m == VoteMode::majority ? "majority" : "error_average"; }

VoteMode vote_mode_from_string(const std::string& s) {
  if (s == "majority") return VoteMode::majority;
  if (s == "error_average") return VoteMode::error_average;
  throw ConfigError("unknown vote mode '" + s + "' (expected majority or error_average)");
}

bool EnsembleConfig::uses(LearnerKind k) const {
  return std::find(learners.begin(), learners.end(), k) != learners.end();
}

std::size_t EnsembleConfig::effective_vote_threshold() const {
  return vote_threshold == 0 ? learners.size() / 2 + 1 : vote_threshold;
}

std::size_t EnsembleConfig::effective_trend_window() const {
  return stl_trend_window == 0 ? stl_period : stl_trend_window;
}

std::size_t EnsembleConfig::warm_length() const {
  std::size_t n = window;
  if (uses(LearnerKind::arima)) n = std::max(n, arima.p + arima.d + 1);
  return n;
}

std::size_t EnsembleConfig::min_fit_length() const {
  std::size_t n = window + 50;
  if (uses(LearnerKind::arima)) n = std::max(n, arima.p + arima.d + arima.q + 20 + 2 * (arima.p + arima.q));
  if (uses(LearnerKind::stl)) {
    n = std::max(n, 2 * stl_period);
    n = std::max(n, 2 * (effective_trend_window() / 2) + stl_period);
  }
  if (uses(LearnerKind::lstsvr)) n = std::max(n, window + 2);
  return n;
}

void EnsembleConfig::validate() const {
  if (learners.empty()) throw ConfigError("at least one learner must be enabled");
  for (std::size_t i = 0; i < learners.size(); ++i) {
    for (std::size_t j = i + 1; j < learners.size(); ++j) {
      if (learners[i] == learners[j]) throw ConfigError(std::string("learner listed twice: ") + to_string(learners[i]));
    }
  }
  if (vote_threshold > learners.size()) {
    throw ConfigError("vote_threshold " + std::to_string(vote_threshold) + " exceeds the number of learners (" +
                      std::to_string(learners.size()) + ")");
  }
  if (window < 2) throw ConfigError("window must be at least 2");
  pot.validate();
  if (!(min_error >= 0.0) || !std::isfinite(min_error)) throw ConfigError("min_error must be finite and >= 0");
  if (arima.d > 3) throw ConfigError("arima.d above 3 is not supported");
  if (stl_period < 2) throw ConfigError("stl.period must be at least 2");
  if (stl_trend_window == 1) throw ConfigError("stl.trend_window must be at least 2");
  if (stl_max_periods < 2) throw ConfigError("stl.max_periods must be at least 2");
  if (!(lstsvr.eps1 >= 0.0) || !(lstsvr.eps2 >= 0.0)) throw ConfigError("lstsvr eps1/eps2 must be >= 0");
  if (!(lstsvr.c1 > 0.0) || !(lstsvr.c2 > 0.0)) throw ConfigError("lstsvr c1/c2 must be positive");
  if (!(lstsvr.kernel.gamma >= 0.0) || !std::isfinite(lstsvr.kernel.gamma)) {
    throw ConfigError("lstsvr gamma must be finite and >= 0 (0 selects it from the data)");
  }
  if (lstsvr_train_rows < 2) throw ConfigError("lstsvr.train_rows must be at least 2");
  if (refit_every < 1) throw ConfigError("refit_every must be at least 1");
}

}  // namespace ens2::ensemble

namespace ens2::ensemble {

nlohmann::json to_json(const EnsembleConfig& c) {
  nlohmann::json names = nlohmann::json::array();
  for (auto k : c.learners) names.push_back(to_string(k));
  return {
      {"learners", names},
      {"vote_mode", to_string(c.vote_mode)},
      {"vote_threshold", c.vote_threshold},
      {"window", c.window},
      {"normalize_input", c.normalize_input},
      {"min_error", c.min_error},
      {"pot",
       {{"q", c.pot.q},
        {"theta", c.pot.theta},
        {"min_peaks", c.pot.min_peaks},
        {"sliding_t", c.pot.sliding_t},
        {"sliding_window", c.pot.sliding_window},
        {"max_peaks", c.pot.max_peaks},
        {"max_anomalies", c.pot.max_anomalies},
        {"estimator", c.pot.estimator == evt::GpdEstimator::lme ? "lme" : "moments"}}},
      {"arima",
       {{"p", c.arima.p},
        {"d", c.arima.d},
        {"q", c.arima.q},
        {"singular", c.arima_singular == learners::SingularPolicy::error ? "error" : "min_norm"}}},
      {"stl", {{"period", c.stl_period}, {"trend_window", c.stl_trend_window}, {"max_periods", c.stl_max_periods}}},
      {"lstsvr",
       {{"kernel", c.lstsvr.kernel.kind == learners::KernelKind::linear ? "linear" : "rbf"},
        {"gamma", c.lstsvr.kernel.gamma},
        {"eps1", c.lstsvr.eps1},
        {"eps2", c.lstsvr.eps2},
        {"c1", c.lstsvr.c1},
        {"c2", c.lstsvr.c2},
        {"train_rows", c.lstsvr_train_rows}}},
      {"refit_every", c.refit_every},
  };
}

EnsembleConfig config_from_json(const nlohmann::json& doc) {
  EnsembleConfig c;
  try {
    c.learners.clear();
    for (const auto& n : doc.at("learners")) c.learners.push_back(learner_from_string(n.get<std::string>()));
    c.vote_mode = vote_mode_from_string(doc.at("vote_mode").get<std::string>());
    c.vote_threshold = doc.at("vote_threshold").get<std::size_t>();
    c.window = doc.at("window").get<std::size_t>();
    c.normalize_input = doc.at("normalize_input").get<bool>();
    c.min_error = doc.at("min_error").get<double>();
    const auto& p = doc.at("pot");
    c.pot.q = p.at("q").get<double>();
    c.pot.theta = p.at("theta").get<double>();
    c.pot.min_peaks = p.at("min_peaks").get<std::size_t>();
    c.pot.sliding_t = p.at("sliding_t").get<bool>();
    c.pot.sliding_window = p.at("sliding_window").get<std::size_t>();
    c.pot.max_peaks = p.at("max_peaks").get<std::size_t>();
    c.pot.max_anomalies = p.at("max_anomalies").get<std::size_t>();
    const auto est = p.at("estimator").get<std::string>();
    if (est != "lme" && est != "moments") throw ConfigError("unknown estimator '" + est + "'");
    c.pot.estimator = est == "lme" ? evt::GpdEstimator::lme : evt::GpdEstimator::moments;
    const auto& a = doc.at("arima");
    c.arima = {a.at("p").get<std::size_t>(), a.at("d").get<std::size_t>(), a.at("q").get<std::size_t>()};
    const auto singular = a.at("singular").get<std::string>();
    if (singular != "error" && singular != "min_norm") throw ConfigError("unknown arima.singular '" + singular + "'");
    c.arima_singular = singular == "error" ? learners::SingularPolicy::error : learners::SingularPolicy::min_norm;
    const auto& s = doc.at("stl");
    c.stl_period = s.at("period").get<std::size_t>();
    c.stl_trend_window = s.at("trend_window").get<std::size_t>();
    c.stl_max_periods = s.at("max_periods").get<std::size_t>();
    const auto& l = doc.at("lstsvr");
    const auto kernel = l.at("kernel").get<std::string>();
    if (kernel != "linear" && kernel != "rbf") throw ConfigError("unknown kernel '" + kernel + "'");
    c.lstsvr.kernel.kind = kernel == "linear" ? learners::KernelKind::linear : learners::KernelKind::rbf;
    c.lstsvr.kernel.gamma = l.at("gamma").get<double>();
    c.lstsvr.eps1 = l.at("eps1").get<double>();
    c.lstsvr.eps2 = l.at("eps2").get<double>();
    c.lstsvr.c1 = l.at("c1").get<double>();
    c.lstsvr.c2 = l.at("c2").get<double>();
    c.lstsvr_train_rows = l.at("train_rows").get<std::size_t>();
    c.refit_every = doc.at("refit_every").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("configuration document: ") + e.what());
  }
  c.validate();
  return c;
}

}  // namespace ens2::ensemble
