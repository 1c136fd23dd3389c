#include "ens2/evt/pot.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ens2/common/error.hpp"
#include "ens2/core/stats.hpp"

namespace ens2::evt {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::normal: return "normal";
    case Verdict::candidate: return "candidate";
    case Verdict::anomaly: return "anomaly";
  }
  return "normal";
}

Verdict verdict_from_string(const std::string& s) {
  if (s == "normal") return Verdict::normal;
  if (s == "candidate") return Verdict::candidate;
  if (s == "anomaly") return Verdict::anomaly;
  throw InvalidArgument("unknown verdict '" + s + "'");
}

void PotConfig::validate() const {
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("pot.q must be in (0, 1)");
  if (!(theta > 0.0 && theta < 1.0)) throw ConfigError("pot.theta must be in (0, 1)");
  if (!(theta < q)) throw ConfigError("pot.theta must be below pot.q");
  if (min_peaks < 2) throw ConfigError("pot.min_peaks must be at least 2");
  if (max_peaks < min_peaks) throw ConfigError("pot.max_peaks must be at least pot.min_peaks");
  if (max_anomalies == 0) throw ConfigError("pot.max_anomalies must be positive");
  if (sliding_t && sliding_window < 30) throw ConfigError("pot.sliding_window must be at least 30");
  if (!(error_floor >= 0.0) || !std::isfinite(error_floor)) throw ConfigError("pot error floor must be finite and >= 0");
}

namespace {

void push_bounded(std::deque<double>& d, double v, std::size_t cap) {
  d.push_back(v);
  while (d.size() > cap) d.pop_front();
}

std::pair<std::uint64_t, std::uint64_t> rate_counts(const PotState& s) {
  if (s.config.sliding_t) return {s.recent.size(), s.peaks.size()};
  return {s.n, s.n_peaks_total};
}

void fit_tail(PotState& s) {
  std::vector<double> excess(s.peaks.begin(), s.peaks.end());
  try {
    if (s.config.estimator == GpdEstimator::moments) {
      s.gpd = gpd_fit_moments(excess);
    } else {
      std::optional<double> hint;
      if (s.gpd) hint = s.gpd->b();
      s.gpd = gpd_fit_lme(excess, hint).params;
    }
  } catch (const Error&) {
    // Degenerate peak set (e.g. all excesses equal); keep the previous model.
  }
}

void update_z(PotState& s) {
  double z = s.z_empirical;
  if (s.gpd && s.peaks.size() >= s.config.min_peaks) {
    const auto [n, n_peaks] = rate_counts(s);
    if (n_peaks > 0 && n_peaks <= n) z = pot_quantile(s.t, *s.gpd, 1.0 - s.config.q, n, n_peaks);
  }
  if (!std::isfinite(z)) z = s.z_empirical;
  s.z = std::max({z, s.t, s.config.error_floor});
}

void refit(PotState& s) {
  if (s.peaks.size() >= s.config.min_peaks) fit_tail(s);
  update_z(s);
}

// sliding_t: t and z_empirical follow the recent window and the peak set is
// rebuilt against the new t.
void rederive_from_window(PotState& s) {
  std::vector<double> sorted(s.recent.begin(), s.recent.end());
  std::sort(sorted.begin(), sorted.end());
  const double t = core::quantile_sorted(sorted, s.config.theta);
  s.z_empirical = core::quantile_sorted(sorted, s.config.q);
  if (t != s.t || s.peaks.empty()) {
    s.t = t;
    s.peaks.clear();
    for (double e : s.recent) {
      if (e > t) push_bounded(s.peaks, e - t, s.config.max_peaks);
    }
  }
  refit(s);
}

}  // namespace

PotState pot_init(std::span<const double> train_errors, const PotConfig& config) {
  config.validate();
  if (train_errors.size() < 30) throw InvalidArgument("pot_init: need at least 30 training errors");
  for (double e : train_errors) {
    if (!std::isfinite(e)) throw InvalidArgument("pot_init: non-finite training error");
  }
  PotState s;
  s.config = config;
  std::vector<double> sorted(train_errors.begin(), train_errors.end());
  std::sort(sorted.begin(), sorted.end());
  s.t = core::quantile_sorted(sorted, config.theta);
  s.z_empirical = core::quantile_sorted(sorted, config.q);
  s.n = train_errors.size();
  for (double e : train_errors) {
    if (e > s.t) {
      push_bounded(s.peaks, e - s.t, config.max_peaks);
      ++s.n_peaks_total;
    }
  }
  if (config.sliding_t) {
    const std::size_t start = train_errors.size() > config.sliding_window ? train_errors.size() - config.sliding_window : 0;
    s.recent.assign(train_errors.begin() + static_cast<std::ptrdiff_t>(start), train_errors.end());
  }
  s.initialized = true;
  refit(s);
  return s;
}

Verdict pot_step(PotState& s, double error, std::int64_t index) {
  if (!s.initialized) throw InvalidArgument("pot_step: detector not initialized");
  if (!std::isfinite(error)) throw InvalidArgument("pot_step: non-finite error");
  ++s.n;
  if (error > s.z) {
    s.anomalies.emplace_back(index, error);
    while (s.anomalies.size() > s.config.max_anomalies) s.anomalies.pop_front();
    ++s.n_anomalies_total;
    return Verdict::anomaly;
  }
  const Verdict verdict = error > s.t ? Verdict::candidate : Verdict::normal;
  if (s.config.sliding_t) {
    push_bounded(s.recent, error, s.config.sliding_window);
    if (verdict == Verdict::candidate) ++s.n_peaks_total;
    rederive_from_window(s);
    return verdict;
  }
  if (verdict == Verdict::candidate) {
    push_bounded(s.peaks, error - s.t, s.config.max_peaks);
    ++s.n_peaks_total;
    refit(s);
  }
  return verdict;
}

namespace {

const char* estimator_name(GpdEstimator e) { return e == GpdEstimator::lme ? "lme" : "moments"; }

GpdEstimator estimator_from_name(const std::string& s) {
  if (s == "lme") return GpdEstimator::lme;
  if (s == "moments") return GpdEstimator::moments;
  throw DataError("pot state: unknown estimator '" + s + "'");
}

}  // namespace

nlohmann::json to_json(const PotState& s) {
  nlohmann::json cfg = {
      {"q", s.config.q},
      {"theta", s.config.theta},
      {"min_peaks", s.config.min_peaks},
      {"sliding_t", s.config.sliding_t},
      {"sliding_window", s.config.sliding_window},
      {"max_peaks", s.config.max_peaks},
      {"max_anomalies", s.config.max_anomalies},
      {"estimator", estimator_name(s.config.estimator)},
      {"error_floor", s.config.error_floor},
  };
  nlohmann::json anomalies = nlohmann::json::array();
  for (const auto& [idx, e] : s.anomalies) anomalies.push_back({idx, e});
  nlohmann::json doc = {
      {"config", cfg},
      {"initialized", s.initialized},
      {"t", s.t},
      {"z", s.z},
      {"z_empirical", s.z_empirical},
      {"peaks", std::vector<double>(s.peaks.begin(), s.peaks.end())},
      {"anomalies", anomalies},
      {"n", s.n},
      {"n_peaks_total", s.n_peaks_total},
      {"n_anomalies_total", s.n_anomalies_total},
      {"recent", std::vector<double>(s.recent.begin(), s.recent.end())},
  };
  if (s.gpd) {
    doc["gpd"] = {{"sigma", s.gpd->sigma}, {"k", s.gpd->k}};
  } else {
    doc["gpd"] = nullptr;
  }
  return doc;
}

PotState pot_state_from_json(const nlohmann::json& doc) {
  PotState s;
  try {
    const auto& c = doc.at("config");
    s.config.q = c.at("q").get<double>();
    s.config.theta = c.at("theta").get<double>();
    s.config.min_peaks = c.at("min_peaks").get<std::size_t>();
    s.config.sliding_t = c.at("sliding_t").get<bool>();
    s.config.sliding_window = c.at("sliding_window").get<std::size_t>();
    s.config.max_peaks = c.at("max_peaks").get<std::size_t>();
    s.config.max_anomalies = c.at("max_anomalies").get<std::size_t>();
    s.config.estimator = estimator_from_name(c.at("estimator").get<std::string>());
    s.config.error_floor = c.at("error_floor").get<double>();
    s.initialized = doc.at("initialized").get<bool>();
    s.t = doc.at("t").get<double>();
    s.z = doc.at("z").get<double>();
    s.z_empirical = doc.at("z_empirical").get<double>();
    for (double p : doc.at("peaks")) s.peaks.push_back(p);
    for (const auto& a : doc.at("anomalies")) s.anomalies.emplace_back(a.at(0).get<std::int64_t>(), a.at(1).get<double>());
    s.n = doc.at("n").get<std::uint64_t>();
    s.n_peaks_total = doc.at("n_peaks_total").get<std::uint64_t>();
    s.n_anomalies_total = doc.at("n_anomalies_total").get<std::uint64_t>();
    for (double r : doc.at("recent")) s.recent.push_back(r);
    const auto& g = doc.at("gpd");
    if (!g.is_null()) s.gpd = GpdParams{g.at("sigma").get<double>(), g.at("k").get<double>()};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("pot state: corrupt document: ") + e.what());
  }
  try {
    s.config.validate();
  } catch (const Error& e) {
    throw DataError(std::string("pot state: ") + e.what());
  }
  if (s.initialized && !(s.z >= s.t)) throw DataError("pot state: z below t");
  for (double p : s.peaks) {
    if (!(p > 0.0)) throw DataError("pot state: non-positive peak");
  }
  if (s.peaks.size() > s.n) throw DataError("pot state: more peaks than observations");
  return s;
}

}  // namespace ens2::evt
