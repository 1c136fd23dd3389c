#include "ens2/ensemble/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "ens2/common/error.hpp"

namespace ens2::ensemble {

using learners::KernelKind;
using learners::LsTsvrModel;
using learners::StlForecastState;

namespace {

template <class Seq>
std::vector<double> last_values(const Seq& seq, std::size_t n) {
  const std::size_t take = std::min(n, static_cast<std::size_t>(seq.size()));
  return std::vector<double>(seq.end() - static_cast<std::ptrdiff_t>(take), seq.end());
}

[[noreturn]] void rethrow_for(LearnerKind k, const Error& e) {
  throw Error(e.kind(), std::string(to_string(k)) + ": " + e.what());
}

evt::PotConfig detector_config(const EnsembleConfig& c, double sigma) {
  auto p = c.pot;
  p.error_floor = c.min_error * sigma;
  return p;
}

std::size_t stl_min_length(const EnsembleConfig& c) {
  return std::max(2 * c.stl_period, 2 * (c.effective_trend_window() / 2) + c.stl_period);
}

StlForecastState decompose_tail(const EnsembleConfig& c, const std::vector<double>& tail, std::int64_t origin) {
  const auto decomp = learners::stl_decompose(tail, c.stl_period, c.effective_trend_window());
  return StlForecastState::from(decomp, static_cast<std::size_t>(origin));
}

LsTsvrModel solve_lstsvr(const EnsembleConfig& c, const std::vector<double>& values) {
  const auto lags = learners::make_lag_windows(values, c.window, c.lstsvr_train_rows);
  auto params = c.lstsvr;
  if (params.kernel.kind == KernelKind::rbf && !(params.kernel.gamma > 0.0)) {
    params.kernel.gamma = learners::default_rbf_gamma(lags.x);
  }
  return learners::lstsvr_fit(lags.x, lags.y, params);
}

double lstsvr_forecast(const LsTsvrModel& m, const std::vector<double>& window) { return learners::lstsvr_predict(m, window); }

}  // namespace

std::vector<std::string> EnsemblePipeline::learner_names() const {
  std::vector<std::string> out;
  for (auto k : config_.learners) out.emplace_back(to_string(k));
  return out;
}

const evt::PotState& EnsemblePipeline::detector(const std::string& name) const {
  if (name == kSharedDetector && shared_) return *shared_;
  const auto it = detectors_.find(name);
  if (it == detectors_.end()) throw InvalidArgument("no detector named '" + name + "'");
  return it->second;
}

std::int64_t EnsemblePipeline::global_index(std::int64_t timestamp) const { return (timestamp - ts0_) / interval_; }

std::size_t EnsemblePipeline::history_capacity() const {
  std::size_t cap = config_.warm_length();
  if (config_.uses(LearnerKind::stl)) cap = std::max(cap, config_.stl_max_periods * config_.stl_period);
  if (config_.uses(LearnerKind::lstsvr)) cap = std::max(cap, config_.window + config_.lstsvr_train_rows);
  return cap;
}

void EnsemblePipeline::check_next(std::int64_t timestamp, double value) const {
  if (!std::isfinite(value)) throw DataError("non-finite value at timestamp " + std::to_string(timestamp));
  if (timestamp <= last_ts_) {
    throw DataError("out-of-order timestamp " + std::to_string(timestamp) + " (last seen " + std::to_string(last_ts_) +
                    ")");
  }
  if ((timestamp - last_ts_) % interval_ != 0) {
    throw DataError("timestamp " + std::to_string(timestamp) + " is off the " + std::to_string(interval_) +
                    " s sampling grid");
  }
}

template <class Seq>
void EnsemblePipeline::refresh_models(Models& models, std::uint64_t k, const Seq& history,
                                      std::int64_t history_begin) const {
  if (k == 0) return;
  const std::size_t len = history.size();
  if (config_.uses(LearnerKind::stl) && k % config_.stl_period == 0 && len >= stl_min_length(config_)) {
    const std::size_t span = std::min(len, config_.stl_max_periods * config_.stl_period);
    try {
      models.stl = decompose_tail(config_, last_values(history, span),
                                  history_begin + static_cast<std::int64_t>(len - span));
    } catch (const Error&) {
      // Keep the previous decomposition.
    }
  }
  if (config_.uses(LearnerKind::lstsvr) && k % config_.refit_every == 0 &&
      len >= config_.window + lstsvr_min_rows_) {
    try {
      models.lstsvr = solve_lstsvr(config_, last_values(history, config_.window + config_.lstsvr_train_rows));
    } catch (const Error&) {
      // Keep the previous model.
    }
  }
}

Detection EnsemblePipeline::score(std::int64_t index, const core::TimePoint& point, const Forecasts& f,
                                  std::map<std::string, evt::PotState>& detectors,
                                  std::optional<evt::PotState>& shared) const {
  Detection d;
  d.kpi_id = kpi_id_;
  d.index = index;
  d.timestamp = point.timestamp;
  d.value = point.value;
  for (const auto& [name, state] : detectors) d.thresholds[name] = {state.t, state.z};
  if (shared) d.thresholds[kSharedDetector] = {shared->t, shared->z};

  const bool ready = f.arima || f.stl || f.lstsvr;
  if (!ready) {
    d.warming = true;
    return d;
  }
  std::size_t votes = 0;
  double error_sum = 0.0;
  for (auto k : config_.learners) {
    const auto& forecast = k == LearnerKind::arima ? f.arima : k == LearnerKind::stl ? f.stl : f.lstsvr;
    LearnerOutput out;
    out.prediction = core::invert(norm_, *forecast);
    out.error = std::abs(point.value - out.prediction);
    const std::string name = to_string(k);
    out.verdict = evt::pot_step(detectors.at(name), out.error, index);
    if (out.verdict == evt::Verdict::anomaly) ++votes;
    error_sum += out.error;
    d.per_learner[name] = out;
  }
  if (config_.vote_mode == VoteMode::majority) {
    d.ensemble_verdict = votes >= config_.effective_vote_threshold();
  } else {
    const double mean_error = error_sum / static_cast<double>(config_.learners.size());
    d.ensemble_verdict = evt::pot_step(*shared, mean_error, index) == evt::Verdict::anomaly;
  }
  return d;
}

EnsemblePipeline EnsemblePipeline::fit(const core::Series& train, const EnsembleConfig& config) {
  config.validate();
  EnsemblePipeline p;
  p.config_ = config;
  p.kpi_id_ = train.id();
  p.interval_ = train.interval();
  p.ts0_ = train[0].timestamp;

  const auto starts = train.segment_starts();
  const std::size_t seg_begin = starts.back();
  const std::size_t n = train.size() - seg_begin;
  const std::size_t prefix = std::max(config.min_fit_length(), (n + 2) / 3);
  constexpr std::size_t kMinCalibration = 30;
  if (n < prefix + kMinCalibration) {
    throw InvalidArgument("insufficient training data: the last contiguous run has " + std::to_string(n) +
                          " points, need at least " + std::to_string(config.min_fit_length() + kMinCalibration));
  }

  std::vector<double> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = train[seg_begin + i].value;
  if (config.normalize_input) {
    p.norm_ = core::fit_normalization(raw);
  }
  std::vector<double> values(n);
  for (std::size_t i = 0; i < n; ++i) values[i] = core::apply(p.norm_, raw[i]);
  p.fit_values_ = values;
  p.fit_begin_index_ = p.global_index(train[seg_begin].timestamp);
  p.fit_prefix_ = prefix;

  // Initial fits on the leading part of the run.
  const std::vector<double> head(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(prefix));
  if (config.uses(LearnerKind::arima)) {
    try {
      p.arima_.emplace(learners::arima_fit(head, config.arima, config.arima_singular));
    } catch (const Error& e) {
      rethrow_for(LearnerKind::arima, e);
    }
  }
  if (config.uses(LearnerKind::stl)) {
    try {
      const std::size_t span = std::min(prefix, config.stl_max_periods * config.stl_period);
      p.models_.stl = decompose_tail(config, last_values(head, span),
                                     p.fit_begin_index_ + static_cast<std::int64_t>(prefix - span));
    } catch (const Error& e) {
      rethrow_for(LearnerKind::stl, e);
    }
  }
  if (config.uses(LearnerKind::lstsvr)) {
    p.lstsvr_min_rows_ = std::min(config.lstsvr_train_rows, prefix - config.window);
    try {
      p.models_.lstsvr = solve_lstsvr(config, last_values(head, config.window + config.lstsvr_train_rows));
    } catch (const Error& e) {
      rethrow_for(LearnerKind::lstsvr, e);
    }
  }
  const std::size_t cap = p.history_capacity();
  for (double v : head) {
    p.history_.push_back(v);
    if (p.history_.size() > cap) p.history_.pop_front();
    if (p.arima_) p.arima_->observe(v);
  }
  p.segment_length_ = prefix;
  p.last_ts_ = train[seg_begin + prefix - 1].timestamp;

  // Replay the rest of the run through the online schedule to collect
  // out-of-sample one-step errors.
  std::map<std::string, std::vector<double>> errors;
  std::vector<double> mean_errors;
  for (std::size_t i = prefix; i < n; ++i) {
    const auto& pt = train[seg_begin + i];
    const std::int64_t g = p.global_index(pt.timestamp);
    p.refresh_models(p.models_, p.steps_, p.history_, g - static_cast<std::int64_t>(p.history_.size()));
    double sum = 0.0;
    for (auto k : config.learners) {
      double f = 0.0;
      if (k == LearnerKind::arima) f = p.arima_->forecast();
      if (k == LearnerKind::stl) f = p.models_.stl->predict(static_cast<std::size_t>(g));
      if (k == LearnerKind::lstsvr) f = lstsvr_forecast(*p.models_.lstsvr, last_values(p.history_, config.window));
      const double e = std::abs(pt.value - core::invert(p.norm_, f));
      errors[to_string(k)].push_back(e);
      sum += e;
    }
    mean_errors.push_back(sum / static_cast<double>(config.learners.size()));
    p.history_.push_back(values[i]);
    if (p.history_.size() > cap) p.history_.pop_front();
    if (p.arima_) p.arima_->observe(values[i]);
    ++p.segment_length_;
    ++p.steps_;
    p.last_ts_ = pt.timestamp;
  }

  const auto pot_config = detector_config(config, p.norm_.sigma);
  for (auto k : config.learners) {
    try {
      p.detectors_.emplace(to_string(k), evt::pot_init(errors.at(to_string(k)), pot_config));
    } catch (const Error& e) {
      rethrow_for(k, e);
    }
  }
  if (config.vote_mode == VoteMode::error_average) p.shared_ = evt::pot_init(mean_errors, pot_config);
  return p;
}

Detection EnsemblePipeline::stream_push(const core::TimePoint& point) {
  check_next(point.timestamp, point.value);
  const std::int64_t g = global_index(point.timestamp);
  const bool gap = point.timestamp - last_ts_ > interval_;

  // Work on copies of the mutable parts so that a failure leaves the state intact.
  auto history = history_;
  auto segment_length = segment_length_;
  auto arima = arima_;
  auto models = models_;
  auto detectors = detectors_;
  auto shared = shared_;
  if (gap) {
    history.clear();
    segment_length = 0;
    if (arima) arima.emplace(arima->model());
  }
  refresh_models(models, steps_, history, g - static_cast<std::int64_t>(history.size()));

  Forecasts f;
  if (segment_length >= config_.warm_length()) {
    if (arima) f.arima = arima->forecast();
    if (models.stl) f.stl = models.stl->predict(static_cast<std::size_t>(g));
    if (models.lstsvr) f.lstsvr = lstsvr_forecast(*models.lstsvr, last_values(history, config_.window));
  }
  Detection d = score(g, point, f, detectors, shared);

  const double x = core::apply(norm_, point.value);
  history.push_back(x);
  if (history.size() > history_capacity()) history.pop_front();
  if (arima) arima->observe(x);

  history_ = std::move(history);
  segment_length_ = segment_length + 1;
  arima_ = std::move(arima);
  models_ = std::move(models);
  detectors_ = std::move(detectors);
  shared_ = std::move(shared);
  ++steps_;
  last_ts_ = point.timestamp;
  streamed_ = true;
  return d;
}

std::vector<Detection> EnsemblePipeline::detect_batch(const core::Series& test) const {
  if (!batch_available()) {
    throw InvalidArgument("detect_batch runs from the fitted state; this pipeline has already streamed points");
  }
  if (test.size() > 1 && test.interval() != interval_) {
    throw DataError("test interval " + std::to_string(test.interval()) + " s does not match the training interval " +
                    std::to_string(interval_) + " s");
  }
  {
    std::int64_t prev = last_ts_;
    for (const auto& pt : test.points()) {
      if (pt.timestamp <= prev) throw DataError("test series does not follow the training data in time");
      if ((pt.timestamp - prev) % interval_ != 0) throw DataError("test timestamps are off the training sampling grid");
      prev = pt.timestamp;
    }
  }

  auto detectors = detectors_;
  auto shared = shared_;
  std::vector<double> hist = fit_values_;
  std::int64_t hist_begin = fit_begin_index_;
  const std::size_t calibration = fit_values_.size() - fit_prefix_;
  learners::ArimaModel arima_model;
  if (arima_) arima_model = arima_->model();

  // Rebuild the models in force at the end of fitting.
  Models models;
  {
    const std::span<const double> head(hist.data(), fit_prefix_);
    if (config_.uses(LearnerKind::stl)) {
      const std::size_t span = std::min(fit_prefix_, config_.stl_max_periods * config_.stl_period);
      models.stl = decompose_tail(config_, last_values(head, span),
                                  hist_begin + static_cast<std::int64_t>(fit_prefix_ - span));
    }
    if (config_.uses(LearnerKind::lstsvr)) {
      models.lstsvr = solve_lstsvr(config_, last_values(head, config_.window + config_.lstsvr_train_rows));
    }
    for (std::uint64_t k = 1; k < calibration; ++k) {
      refresh_models(models, k, std::span<const double>(hist.data(), fit_prefix_ + k), hist_begin);
    }
  }

  std::vector<Detection> out;
  out.reserve(test.size());
  std::int64_t prev_ts = last_ts_;
  std::uint64_t k = calibration;
  for (const auto& pt : test.points()) {
    const std::int64_t g = global_index(pt.timestamp);
    if (pt.timestamp - prev_ts > interval_) {
      hist.clear();
      hist_begin = g;
    }
    refresh_models(models, k, std::span<const double>(hist), hist_begin);
    Forecasts f;
    if (hist.size() >= config_.warm_length()) {
      if (arima_) f.arima = learners::arima_predict_next(arima_model, hist);
      if (models.stl) f.stl = models.stl->predict(static_cast<std::size_t>(g));
      if (models.lstsvr) f.lstsvr = lstsvr_forecast(*models.lstsvr, last_values(hist, config_.window));
    }
    out.push_back(score(g, pt, f, detectors, shared));
    hist.push_back(core::apply(norm_, pt.value));
    prev_ts = pt.timestamp;
    ++k;
  }
  return out;
}

// ---- checkpoint ----

namespace {

nlohmann::json lstsvr_to_json(const LsTsvrModel& m) {
  const auto& x = m.support_inputs;
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(x.size()));
  for (Eigen::Index r = 0; r < x.rows(); ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) flat.push_back(x(r, c));
  return {
      {"rows", x.rows()},
      {"cols", x.cols()},
      {"support_inputs", flat},
      {"omega1", std::vector<double>(m.omega1.data(), m.omega1.data() + m.omega1.size())},
      {"omega2", std::vector<double>(m.omega2.data(), m.omega2.data() + m.omega2.size())},
      {"b1", m.b1},
      {"b2", m.b2},
      {"eps1", m.eps1},
      {"eps2", m.eps2},
      {"c1", m.c1},
      {"c2", m.c2},
      {"kernel", m.kernel.kind == KernelKind::linear ? "linear" : "rbf"},
      {"gamma", m.kernel.gamma},
  };
}

learners::Vector to_vector(const std::vector<double>& v) {
  learners::Vector out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

LsTsvrModel lstsvr_from_json(const nlohmann::json& j) {
  LsTsvrModel m;
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto flat = j.at("support_inputs").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || flat.size() != static_cast<std::size_t>(rows * cols)) {
    throw DataError("checkpoint: lstsvr support matrix has the wrong size");
  }
  m.support_inputs.resize(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m.support_inputs(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
  m.omega1 = to_vector(j.at("omega1").get<std::vector<double>>());
  m.omega2 = to_vector(j.at("omega2").get<std::vector<double>>());
  if (m.omega1.size() != rows || m.omega2.size() != rows) throw DataError("checkpoint: lstsvr weight length mismatch");
  m.b1 = j.at("b1").get<double>();
  m.b2 = j.at("b2").get<double>();
  m.eps1 = j.at("eps1").get<double>();
  m.eps2 = j.at("eps2").get<double>();
  m.c1 = j.at("c1").get<double>();
  m.c2 = j.at("c2").get<double>();
  m.kernel.kind = j.at("kernel").get<std::string>() == "rbf" ? KernelKind::rbf : KernelKind::linear;
  m.kernel.gamma = j.at("gamma").get<double>();
  return m;
}

}  // namespace

nlohmann::json EnsemblePipeline::checkpoint() const {
  nlohmann::json doc;
  doc["format"] = "ens2-pipeline";
  doc["schema_version"] = kCheckpointVersion;
  doc["config"] = to_json(config_);
  doc["kpi_id"] = kpi_id_;
  doc["interval"] = interval_;
  doc["ts0"] = ts0_;
  doc["normalization"] = {{"mu", norm_.mu}, {"sigma", norm_.sigma}};
  doc["last_timestamp"] = last_ts_;
  doc["steps"] = steps_;
  doc["segment_length"] = segment_length_;
  doc["history"] = std::vector<double>(history_.begin(), history_.end());
  if (arima_) {
    const auto& m = arima_->model();
    doc["arima"] = {
        {"p", m.p},
        {"d", m.d},
        {"q", m.q},
        {"phi", m.phi},
        {"theta", m.theta},
        {"c", m.c},
        {"recent_residuals", m.recent_residuals},
        {"tail", std::vector<double>(arima_->tail().begin(), arima_->tail().end())},
        {"residuals", std::vector<double>(arima_->residuals().begin(), arima_->residuals().end())},
    };
  }
  if (models_.stl) {
    doc["stl"] = {{"level", models_.stl->level}, {"profile", models_.stl->profile}, {"origin", models_.stl->origin}};
  }
  if (models_.lstsvr) doc["lstsvr"] = lstsvr_to_json(*models_.lstsvr);
  doc["lstsvr_min_rows"] = lstsvr_min_rows_;
  nlohmann::json dets = nlohmann::json::object();
  for (const auto& [name, s] : detectors_) dets[name] = evt::to_json(s);
  doc["detectors"] = dets;
  if (shared_) doc["shared_detector"] = evt::to_json(*shared_);
  if (batch_available()) {
    doc["fit"] = {{"values", fit_values_}, {"begin_index", fit_begin_index_}, {"prefix", fit_prefix_}};
  }
  return doc;
}

EnsemblePipeline EnsemblePipeline::restore(const nlohmann::json& doc) {
  if (!doc.is_object() || doc.value("format", std::string()) != "ens2-pipeline") {
    throw DataError("checkpoint: not a pipeline checkpoint");
  }
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw DataError("checkpoint: missing schema_version");
  }
  const int version = doc["schema_version"].get<int>();
  if (version != kCheckpointVersion) {
    throw DataError("checkpoint: schema version " + std::to_string(version) + " is not supported (expected " +
                    std::to_string(kCheckpointVersion) + ")");
  }
  EnsemblePipeline p;
  try {
    p.config_ = config_from_json(doc.at("config"));
    p.kpi_id_ = doc.at("kpi_id").get<std::string>();
    p.interval_ = doc.at("interval").get<std::int64_t>();
    if (p.interval_ <= 0) throw DataError("checkpoint: non-positive interval");
    p.ts0_ = doc.at("ts0").get<std::int64_t>();
    p.norm_.mu = doc.at("normalization").at("mu").get<double>();
    p.norm_.sigma = doc.at("normalization").at("sigma").get<double>();
    if (!(p.norm_.sigma > 0.0)) throw DataError("checkpoint: non-positive normalization sigma");
    p.last_ts_ = doc.at("last_timestamp").get<std::int64_t>();
    p.steps_ = doc.at("steps").get<std::uint64_t>();
    p.segment_length_ = doc.at("segment_length").get<std::size_t>();
    for (double v : doc.at("history")) p.history_.push_back(v);
    if (p.config_.uses(LearnerKind::arima)) {
      const auto& a = doc.at("arima");
      learners::ArimaModel m;
      m.p = a.at("p").get<std::size_t>();
      m.d = a.at("d").get<std::size_t>();
      m.q = a.at("q").get<std::size_t>();
      m.phi = a.at("phi").get<std::vector<double>>();
      m.theta = a.at("theta").get<std::vector<double>>();
      m.c = a.at("c").get<double>();
      m.recent_residuals = a.at("recent_residuals").get<std::vector<double>>();
      if (m.phi.size() != m.p || m.theta.size() != m.q) throw DataError("checkpoint: arima coefficient count mismatch");
      p.arima_ = learners::ArimaRecursion::restore(std::move(m), a.at("tail").get<std::vector<double>>(),
                                                   a.at("residuals").get<std::vector<double>>());
    }
    if (p.config_.uses(LearnerKind::stl)) {
      const auto& s = doc.at("stl");
      StlForecastState st;
      st.level = s.at("level").get<double>();
      st.profile = s.at("profile").get<std::vector<double>>();
      st.origin = s.at("origin").get<std::size_t>();
      if (st.profile.size() != p.config_.stl_period) throw DataError("checkpoint: stl profile length mismatch");
      p.models_.stl = std::move(st);
    }
    if (p.config_.uses(LearnerKind::lstsvr)) p.models_.lstsvr = lstsvr_from_json(doc.at("lstsvr"));
    p.lstsvr_min_rows_ = doc.at("lstsvr_min_rows").get<std::size_t>();
    for (const auto& [name, s] : doc.at("detectors").items()) p.detectors_.emplace(name, evt::pot_state_from_json(s));
    for (auto k : p.config_.learners) {
      if (!p.detectors_.count(to_string(k))) throw DataError(std::string("checkpoint: missing detector ") + to_string(k));
    }
    if (p.config_.vote_mode == VoteMode::error_average) p.shared_ = evt::pot_state_from_json(doc.at("shared_detector"));
    if (doc.contains("fit")) {
      const auto& f = doc["fit"];
      p.fit_values_ = f.at("values").get<std::vector<double>>();
      p.fit_begin_index_ = f.at("begin_index").get<std::int64_t>();
      p.fit_prefix_ = f.at("prefix").get<std::size_t>();
      if (p.fit_prefix_ >= p.fit_values_.size()) throw DataError("checkpoint: inconsistent fit record");
    } else {
      p.streamed_ = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint: corrupt document: ") + e.what());
  } catch (const ConfigError& e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  return p;
}

}  // namespace ens2::ensemble
