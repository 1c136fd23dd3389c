#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "ens2/common/error.hpp"

namespace ens2::cli {
namespace {

using ensemble::LearnerKind;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& expected) {
  throw ConfigError("config key '" + key + "': invalid value '" + value + "' (expected " + expected + ")");
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "a non-negative integer");
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) { return static_cast<std::size_t>(to_u64(key, v)); }

std::int64_t to_i64(const std::string& key, const std::string& v) {
  std::int64_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "an integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "a number");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "true or false");
}

std::string from_double(double v) { return core::format_double(v); }
std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Key {
  std::string name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SIZE_KEY(NAME, FIELD) \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_size(NAME, v); }, \
      [](const RunConfig& c) { return std::to_string(c.FIELD); }}
#define I64_KEY(NAME, FIELD) \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_i64(NAME, v); }, \
      [](const RunConfig& c) { return std::to_string(c.FIELD); }}
#define DOUBLE_KEY(NAME, FIELD) \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_double(NAME, v); }, \
      [](const RunConfig& c) { return from_double(c.FIELD); }}
#define BOOL_KEY(NAME, FIELD) \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = to_bool(NAME, v); }, \
      [](const RunConfig& c) { return from_bool(c.FIELD); }}
#define STRING_KEY(NAME, FIELD) \
  Key{NAME, [](RunConfig& c, const std::string& v) { c.FIELD = v; }, [](const RunConfig& c) { return c.FIELD; }}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = {
      Key{"learners",
          [](RunConfig& c, const std::string& v) {
            std::vector<LearnerKind> out;
            std::stringstream ss(v);
            std::string item;
            while (std::getline(ss, item, ',')) {
              item = trim(item);
              if (!item.empty()) out.push_back(ensemble::learner_from_string(item));
            }
            if (out.empty()) bad("learners", v, "a comma-separated subset of arima,stl,lstsvr");
            c.ensemble.learners = out;
          },
          [](const RunConfig& c) {
            std::string s;
            for (auto k : c.ensemble.learners) s += (s.empty() ? "" : ",") + std::string(ensemble::to_string(k));
            return s;
          }},
      Key{"vote_mode",
          [](RunConfig& c, const std::string& v) { c.ensemble.vote_mode = ensemble::vote_mode_from_string(v); },
          [](const RunConfig& c) { return std::string(ensemble::to_string(c.ensemble.vote_mode)); }},
      SIZE_KEY("vote_threshold", ensemble.vote_threshold),
      SIZE_KEY("window", ensemble.window),
      BOOL_KEY("normalize", ensemble.normalize_input),
      DOUBLE_KEY("min_error", ensemble.min_error),
      DOUBLE_KEY("pot.q", ensemble.pot.q),
      DOUBLE_KEY("pot.theta", ensemble.pot.theta),
      SIZE_KEY("pot.min_peaks", ensemble.pot.min_peaks),
      BOOL_KEY("pot.sliding_t", ensemble.pot.sliding_t),
      SIZE_KEY("pot.sliding_window", ensemble.pot.sliding_window),
      SIZE_KEY("pot.max_peaks", ensemble.pot.max_peaks),
      SIZE_KEY("pot.max_anomalies", ensemble.pot.max_anomalies),
      Key{"pot.estimator",
          [](RunConfig& c, const std::string& v) {
            if (v == "lme") c.ensemble.pot.estimator = evt::GpdEstimator::lme;
            else if (v == "moments") c.ensemble.pot.estimator = evt::GpdEstimator::moments;
            else bad("pot.estimator", v, "lme or moments");
          },
          [](const RunConfig& c) {
            return std::string(c.ensemble.pot.estimator == evt::GpdEstimator::lme ? "lme" : "moments");
          }},
      SIZE_KEY("arima.p", ensemble.arima.p),
      SIZE_KEY("arima.d", ensemble.arima.d),
      SIZE_KEY("arima.q", ensemble.arima.q),
      Key{"arima.singular",
          [](RunConfig& c, const std::string& v) {
            if (v == "error") c.ensemble.arima_singular = learners::SingularPolicy::error;
            else if (v == "min_norm") c.ensemble.arima_singular = learners::SingularPolicy::min_norm;
            else bad("arima.singular", v, "error or min_norm");
          },
          [](const RunConfig& c) {
            return std::string(c.ensemble.arima_singular == learners::SingularPolicy::error ? "error" : "min_norm");
          }},
      SIZE_KEY("stl.period", ensemble.stl_period),
      SIZE_KEY("stl.trend_window", ensemble.stl_trend_window),
      SIZE_KEY("stl.max_periods", ensemble.stl_max_periods),
      Key{"lstsvr.kernel",
          [](RunConfig& c, const std::string& v) {
            if (v == "linear") c.ensemble.lstsvr.kernel.kind = learners::KernelKind::linear;
            else if (v == "rbf") c.ensemble.lstsvr.kernel.kind = learners::KernelKind::rbf;
            else bad("lstsvr.kernel", v, "linear or rbf");
          },
          [](const RunConfig& c) {
            return std::string(c.ensemble.lstsvr.kernel.kind == learners::KernelKind::linear ? "linear" : "rbf");
          }},
      DOUBLE_KEY("lstsvr.gamma", ensemble.lstsvr.kernel.gamma),
      DOUBLE_KEY("lstsvr.eps1", ensemble.lstsvr.eps1),
      DOUBLE_KEY("lstsvr.eps2", ensemble.lstsvr.eps2),
      DOUBLE_KEY("lstsvr.c1", ensemble.lstsvr.c1),
      DOUBLE_KEY("lstsvr.c2", ensemble.lstsvr.c2),
      SIZE_KEY("lstsvr.train_rows", ensemble.lstsvr_train_rows),
      SIZE_KEY("refit_every", ensemble.refit_every),
      Key{"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
          [](const RunConfig& c) { return std::to_string(c.seed); }},
      Key{"output.format",
          [](RunConfig& c, const std::string& v) {
            if (v == "jsonl") c.format = OutputFormat::jsonl;
            else if (v == "csv") c.format = OutputFormat::csv;
            else bad("output.format", v, "jsonl or csv");
          },
          [](const RunConfig& c) { return std::string(c.format == OutputFormat::jsonl ? "jsonl" : "csv"); }},
      STRING_KEY("output.path", output),
      STRING_KEY("train", train),
      STRING_KEY("test", test),
      STRING_KEY("labels", labels),
      STRING_KEY("checkpoint", checkpoint),
      I64_KEY("eval.T", eval_t),
      Key{"eval.ablation",
          [](RunConfig& c, const std::string& v) {
            if (v != "without" && v != "only" && v != "none") bad("eval.ablation", v, "without, only or none");
            c.ablation = v;
          },
          [](const RunConfig& c) { return c.ablation; }},
      SIZE_KEY("threads", threads),
      STRING_KEY("csv.timestamp_column", csv.timestamp_column),
      STRING_KEY("csv.value_column", csv.value_column),
      STRING_KEY("csv.label_column", csv.label_column),
      STRING_KEY("csv.id_column", csv.id_column),
      STRING_KEY("csv.default_id", csv.default_id),
      I64_KEY("csv.default_interval", csv.default_interval),
      SIZE_KEY("synth.periods", synth.periods),
      SIZE_KEY("synth.period_len", synth.period_len),
      DOUBLE_KEY("synth.noise_sigma", synth.noise_sigma),
      SIZE_KEY("synth.anomalies", synth.anomalies),
      SIZE_KEY("synth.anomaly_begin", synth.anomaly_begin),
      SIZE_KEY("synth.anomaly_end", synth.anomaly_end),
      SIZE_KEY("synth.min_gap", synth.min_gap),
      DOUBLE_KEY("synth.magnitude_min", synth.magnitude_min),
      DOUBLE_KEY("synth.magnitude_max", synth.magnitude_max),
      I64_KEY("synth.start", synth.start),
      I64_KEY("synth.interval", synth.interval),
      STRING_KEY("synth.id", synth.id),
      SIZE_KEY("entropy.window", entropy_window),
      SIZE_KEY("entropy.order", entropy_order),
  };
  return table;
}

}  // namespace

void apply_setting(RunConfig& config, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  for (const auto& k : keys()) {
    if (k.name == key) {
      k.set(config, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void parse_config(RunConfig& config, std::istream& in, const std::string& source) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(n) + ": expected key = value");
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(n) + ": " + e.what());
    }
  }
}

void load_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  parse_config(config, in, path.string());
}

std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& k : keys()) out.emplace_back(k.name, k.get(config));
  std::sort(out.begin(), out.end());
  return out;
}

std::string config_text(const RunConfig& config) {
  std::string s;
  for (const auto& [k, v] : config_entries(config)) s += k + " = " + v + "\n";
  return s;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = 1469598103934665603ULL;
  static const char* const kPathKeys[] = {"output.path", "train", "test", "labels", "checkpoint", "threads"};
  for (const auto& [k, v] : config_entries(config)) {
    if (std::find(std::begin(kPathKeys), std::end(kPathKeys), k) != std::end(kPathKeys)) continue;
    for (unsigned char c : k + " = " + v + "\n") {
      h ^= c;
      h *= 1099511628211ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace ens2::cli
