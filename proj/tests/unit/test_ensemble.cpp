#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "ens2/common/error.hpp"
#include "ens2/core/synthetic.hpp"
#include "ens2/ensemble/config.hpp"
#include "ens2/ensemble/detection.hpp"
#include "ens2/ensemble/pipeline.hpp"

using namespace ens2;
using namespace ens2::ensemble;
using core::Series;
using core::SyntheticOptions;

namespace {

constexpr std::size_t kPeriod = 100;

EnsembleConfig small_config() {
  EnsembleConfig c;
  c.window = 20;
  c.stl_period = kPeriod;
  c.lstsvr_train_rows = 150;
  c.refit_every = 50;
  return c;
}

Series synthetic(std::size_t periods, double noise, std::vector<core::InjectedAnomaly> spikes = {},
                 std::uint64_t seed = 42) {
  SyntheticOptions o;
  o.periods = periods;
  o.period_len = kPeriod;
  o.noise_sigma = noise;
  o.anomalies = std::move(spikes);
  o.seed = seed;
  return core::generate_synthetic(o);
}

std::vector<core::TimePoint> tail_points(const Series& s, std::size_t from) {
  return {s.points().begin() + static_cast<std::ptrdiff_t>(from), s.points().end()};
}

std::vector<Detection> stream_all(EnsemblePipeline& p, const std::vector<core::TimePoint>& pts) {
  std::vector<Detection> out;
  for (const auto& pt : pts) out.push_back(p.stream_push(pt));
  return out;
}

std::vector<char> verdicts(const std::vector<Detection>& ds) {
  std::vector<char> v;
  for (const auto& d : ds) v.push_back(d.ensemble_verdict);
  return v;
}

}  // namespace

TEST_CASE("config defaults and validation") {
  EnsembleConfig c;
  CHECK(c.learners.size() == 3);
  CHECK(c.window == 60);
  CHECK(c.effective_vote_threshold() == 2);
  CHECK(c.effective_trend_window() == c.stl_period);
  c.validate();
  c.vote_threshold = 4;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.vote_threshold = 1;
  c.learners = {};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.learners = {LearnerKind::stl};
  CHECK(c.effective_vote_threshold() == 1);
  c.validate();
  c.learners = {LearnerKind::stl, LearnerKind::stl};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(learner_from_string("svm"), ConfigError);
  CHECK(vote_mode_from_string("error_average") == VoteMode::error_average);
}

TEST_CASE("config JSON round trip") {
  EnsembleConfig c = small_config();
  c.learners = {LearnerKind::lstsvr, LearnerKind::arima};
  c.vote_mode = VoteMode::error_average;
  c.pot.q = 0.995;
  c.pot.sliding_t = true;
  c.arima = {2, 1, 1};
  c.lstsvr.kernel = {learners::KernelKind::rbf, 0.25};
  const auto back = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.learners == c.learners);
  CHECK(back.pot.q == 0.995);
  CHECK(back.lstsvr.kernel.kind == learners::KernelKind::rbf);
}

TEST_CASE("fit: full synthetic set initializes three populated detectors") {
  SyntheticOptions o;
  const auto s = core::generate_synthetic(o);
  const auto p = EnsemblePipeline::fit(s.slice(0, 6 * 1440), EnsembleConfig{});
  REQUIRE(p.detectors().size() == 3);
  for (const auto& [name, st] : p.detectors()) {
    INFO(name);
    CHECK(st.initialized);
    CHECK(st.peaks.size() >= st.config.min_peaks);
  }
}

TEST_CASE("fit: subset and preconditions") {
  auto c = small_config();
  c.learners = {LearnerKind::stl};
  const auto s = synthetic(5, 0.1);
  const auto p = EnsemblePipeline::fit(s, c);
  CHECK(p.learner_names() == std::vector<std::string>{"stl"});
  CHECK(p.detectors().size() == 1);
  CHECK_THROWS_AS(EnsemblePipeline::fit(s.slice(0, 10), c), InvalidArgument);
}

TEST_CASE("detect_batch: injected 8 sigma spikes are found within 7 steps") {
  const std::vector<core::InjectedAnomaly> spikes{{520, 0.8}, {610, -0.8}, {705, 0.8}, {790, -0.8}};
  const auto s = synthetic(8, 0.1, spikes);
  auto c = small_config();
  c.pot.q = 0.999;
  const auto p = EnsemblePipeline::fit(s.slice(0, 500), c);
  const auto ds = p.detect_batch(s.slice(500, s.size()));
  for (const auto& sp : spikes) {
    bool hit = false;
    for (const auto& d : ds)
      if (d.ensemble_verdict && std::abs(d.index - std::int64_t(sp.index)) <= 7) hit = true;
    INFO("spike at " << sp.index);
    CHECK(hit);
  }
}

TEST_CASE("detect_batch: noise-free sine raises nothing") {
  const auto s = synthetic(8, 0.0);
  const auto p = EnsemblePipeline::fit(s.slice(0, 500), small_config());
  const auto ds = p.detect_batch(s.slice(500, s.size()));
  REQUIRE(ds.size() == 300);
  for (const auto& d : ds) {
    CHECK(!d.ensemble_verdict);
    for (const auto& [name, out] : d.per_learner) CHECK(out.verdict != evt::Verdict::anomaly);
  }
}

TEST_CASE("detection records satisfy their invariants") {
  const auto s = synthetic(8, 0.1, {{600, 1.0}, {700, -1.0}});
  for (VoteMode mode : {VoteMode::majority, VoteMode::error_average}) {
    auto c = small_config();
    c.vote_mode = mode;
    c.pot.sliding_t = mode == VoteMode::error_average;
    c.pot.sliding_window = 100;
    const auto p = EnsemblePipeline::fit(s.slice(0, 500), c);
    const auto ds = p.detect_batch(s.slice(500, s.size()));
    for (const auto& d : ds) {
      REQUIRE(!d.warming);
      REQUIRE(d.per_learner.size() == 3);
      std::size_t votes = 0;
      double sum = 0;
      for (const auto& [name, out] : d.per_learner) {
        CHECK(out.error == std::abs(d.value - out.prediction));
        const auto& th = d.thresholds.at(name);
        CHECK(th.z >= th.t);
        if (out.verdict == evt::Verdict::anomaly) {
          ++votes;
          CHECK(out.error > th.t);
        }
      }
      for (const char* name : {"arima", "stl", "lstsvr"}) sum += d.per_learner.at(name).error;
      if (mode == VoteMode::majority) {
        CHECK(d.ensemble_verdict == (votes >= 2));
      } else {
        const auto& th = d.thresholds.at(kSharedDetector);
        CHECK(d.ensemble_verdict == (sum / 3.0 > th.z));
      }
    }
  }
}

TEST_CASE("property: raising vote_threshold never adds anomalies") {
  const auto s = synthetic(8, 0.2, {{550, 0.7}, {640, 0.9}, {760, -0.6}}, 3);
  std::vector<std::vector<char>> runs;
  for (std::size_t th : {1u, 2u, 3u}) {
    auto c = small_config();
    c.vote_threshold = th;
    runs.push_back(verdicts(EnsemblePipeline::fit(s.slice(0, 500), c).detect_batch(s.slice(500, s.size()))));
  }
  for (std::size_t i = 0; i < runs[0].size(); ++i) {
    CHECK((!runs[2][i] || runs[1][i]));
    CHECK((!runs[1][i] || runs[0][i]));
  }
}

TEST_CASE("property: a single-learner ensemble follows that learner's detector") {
  const auto s = synthetic(8, 0.15, {{560, 0.8}, {720, -0.9}}, 9);
  for (LearnerKind k : {LearnerKind::arima, LearnerKind::stl, LearnerKind::lstsvr}) {
    auto c = small_config();
    c.learners = {k};
    c.vote_threshold = 1;
    const auto ds = EnsemblePipeline::fit(s.slice(0, 500), c).detect_batch(s.slice(500, s.size()));
    // The same errors through a shared detector initialized on the same
    // calibration errors must agree as well.
    c.vote_mode = VoteMode::error_average;
    const auto avg = EnsemblePipeline::fit(s.slice(0, 500), c).detect_batch(s.slice(500, s.size()));
    REQUIRE(ds.size() == avg.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const auto& out = ds[i].per_learner.at(to_string(k));
      CHECK(ds[i].ensemble_verdict == (out.verdict == evt::Verdict::anomaly));
      CHECK(avg[i].ensemble_verdict == ds[i].ensemble_verdict);
    }
  }
}

TEST_CASE("property: identical inputs give identical detections") {
  const auto s = synthetic(8, 0.1, {{650, 1.0}});
  const auto a = EnsemblePipeline::fit(s.slice(0, 500), small_config()).detect_batch(s.slice(500, s.size()));
  const auto b = EnsemblePipeline::fit(s.slice(0, 500), small_config()).detect_batch(s.slice(500, s.size()));
  CHECK(a == b);
  std::ostringstream ja, jb;
  write_jsonl(ja, a);
  write_jsonl(jb, b);
  CHECK(ja.str() == jb.str());
}

TEST_CASE("stream matches batch at refit_every = 1 over 2000 points") {
  const auto s = synthetic(25, 0.1, {{900, 1.0}, {1500, -1.0}, {2200, 0.9}}, 5);
  auto c = small_config();
  c.refit_every = 1;
  c.lstsvr_train_rows = 40;
  auto p = EnsemblePipeline::fit(s.slice(0, 400), c);
  const auto batch = p.detect_batch(s.slice(400, s.size()));
  REQUIRE(batch.size() >= 2000);
  const auto streamed = stream_all(p, tail_points(s, 400));
  REQUIRE(streamed.size() == batch.size());
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) mismatches += !(batch[i] == streamed[i]);
  CHECK(mismatches == 0);
  CHECK(!p.batch_available());
  CHECK_THROWS_AS(p.detect_batch(s.slice(400, s.size())), InvalidArgument);
}

TEST_CASE("stream matches batch with the default refit schedule") {
  const auto s = synthetic(8, 0.1, {{650, 1.0}});
  auto p = EnsemblePipeline::fit(s.slice(0, 500), small_config());
  const auto batch = p.detect_batch(s.slice(500, s.size()));
  CHECK(stream_all(p, tail_points(s, 500)) == batch);
}

TEST_CASE("stream_push rejects bad points and keeps its state") {
  const auto s = synthetic(6, 0.1);
  auto p = EnsemblePipeline::fit(s.slice(0, 500), small_config());
  p.stream_push(s[500]);
  const auto before = p.checkpoint().dump();
  CHECK_THROWS_AS(p.stream_push(s[500]), DataError);
  CHECK_THROWS_AS(p.stream_push(s[499]), DataError);
  CHECK_THROWS_AS(p.stream_push({s[501].timestamp + 7, 0.0, {}}), DataError);
  CHECK_THROWS_AS(p.stream_push({s[501].timestamp, NAN, {}}), DataError);
  CHECK(p.checkpoint().dump() == before);
  CHECK_NOTHROW(p.stream_push(s[501]));
}

TEST_CASE("a gap resets history and warms up again") {
  const auto s = synthetic(8, 0.1);
  auto c = small_config();
  auto p = EnsemblePipeline::fit(s.slice(0, 500), c);
  std::vector<core::TimePoint> pts = tail_points(s, 500);
  pts.erase(pts.begin() + 50, pts.begin() + 60);
  const auto ds = stream_all(p, pts);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const bool expect_warm = i >= 50 && i < 50 + c.warm_length();
    INFO("position " << i);
    CHECK(ds[i].warming == expect_warm);
    if (ds[i].warming) {
      CHECK(!ds[i].ensemble_verdict);
      CHECK(ds[i].per_learner.empty());
    }
  }
  CHECK(ds[55].index == 565);
}

TEST_CASE("checkpoint and restore continue identically") {
  const auto s = synthetic(10, 0.1, {{700, 1.0}, {900, -1.0}});
  auto c = small_config();
  c.pot.sliding_t = true;
  c.pot.sliding_window = 200;
  auto p = EnsemblePipeline::fit(s.slice(0, 500), c);
  const auto pts = tail_points(s, 500);
  for (std::size_t i = 0; i < 150; ++i) p.stream_push(pts[i]);
  const auto doc = p.checkpoint();
  CHECK(doc.at("schema_version") == kCheckpointVersion);
  auto q = EnsemblePipeline::restore(nlohmann::json::parse(doc.dump()));
  const std::vector<core::TimePoint> rest(pts.begin() + 150, pts.end());
  CHECK(stream_all(p, rest) == stream_all(q, rest));
}

TEST_CASE("checkpoint before streaming still supports batch detection") {
  const auto s = synthetic(8, 0.1, {{650, 1.0}});
  const auto p = EnsemblePipeline::fit(s.slice(0, 500), small_config());
  const auto q = EnsemblePipeline::restore(nlohmann::json::parse(p.checkpoint().dump()));
  CHECK(q.batch_available());
  CHECK(q.detect_batch(s.slice(500, s.size())) == p.detect_batch(s.slice(500, s.size())));
}

TEST_CASE("restore rejects corrupt and foreign documents") {
  const auto s = synthetic(6, 0.1);
  const auto p = EnsemblePipeline::fit(s.slice(0, 500), small_config());
  const auto text = p.checkpoint().dump();
  CHECK_THROWS_AS(EnsemblePipeline::restore(nlohmann::json::parse(text.substr(0, text.size() / 2), nullptr, false)),
                  DataError);
  auto doc = p.checkpoint();
  doc["schema_version"] = 99;
  CHECK_THROWS_AS(EnsemblePipeline::restore(doc), DataError);
  doc = p.checkpoint();
  doc.erase("detectors");
  CHECK_THROWS_AS(EnsemblePipeline::restore(doc), DataError);
  CHECK_THROWS_AS(EnsemblePipeline::restore(nlohmann::json{{"format", "other"}}), DataError);
}

TEST_CASE("detection files round trip in both formats") {
  const auto s = synthetic(8, 0.1, {{650, 1.0}});
  auto c = small_config();
  c.vote_mode = VoteMode::error_average;
  auto p = EnsemblePipeline::fit(s.slice(0, 500), c);
  std::vector<core::TimePoint> pts = tail_points(s, 500);
  pts.erase(pts.begin() + 10, pts.begin() + 12);
  const auto ds = stream_all(p, pts);

  std::stringstream jl;
  jl << "{\"meta\":{\"tool\":\"x\"}}\n";
  write_jsonl(jl, ds);
  CHECK(read_detections(jl, "jsonl") == ds);

  std::stringstream csv;
  csv << "# config: x\n";
  write_csv(csv, ds, p.learner_names());
  CHECK(read_detections(csv, "csv") == ds);

  std::stringstream broken("{\"index\": 3\n");
  CHECK_THROWS_AS(read_detections(broken, "broken"), DataError);
}
