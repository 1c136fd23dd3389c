#include "commands.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>
#include <array>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <thread>

#include "ens2/common/error.hpp"
#include "ens2/core/csv.hpp"
#include "ens2/core/synthetic.hpp"
#include "ens2/diagnostics/entropy.hpp"
#include "ens2/diagnostics/metrics.hpp"
#include "ens2/ensemble/detection.hpp"
#include "ens2/ensemble/pipeline.hpp"
#include "run_config.hpp"

#ifndef ENS2_VERSION
#define ENS2_VERSION "0.0.0"
#endif

namespace ens2::cli {
namespace {

using ensemble::Detection;
using ensemble::EnsemblePipeline;

volatile std::sig_atomic_t g_checkpoint_requested = 0;
volatile std::sig_atomic_t g_stop_requested = 0;

extern "C" void on_checkpoint_signal(int) { g_checkpoint_requested = 1; }
extern "C" void on_stop_signal(int) { g_stop_requested = 1; }

void install_handler(int sig, void (*fn)(int)) {
  struct sigaction sa {};
  sa.sa_handler = fn;
  sigemptyset(&sa.sa_mask);
  sa.sa_flags = 0;  // no SA_RESTART: a blocked read returns so the loop can react
  sigaction(sig, &sa, nullptr);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument:
    case ErrorKind::config: return kExitConfig;
    case ErrorKind::io: return kExitIo;
    case ErrorKind::data: return kExitData;
    case ErrorKind::computation: return kExitCompute;
  }
  return kExitUnexpected;
}

std::string versions() {
  return std::string("ens2 ") + ENS2_VERSION + "; eigen " + std::to_string(EIGEN_WORLD_VERSION) + "." +
         std::to_string(EIGEN_MAJOR_VERSION) + "." + std::to_string(EIGEN_MINOR_VERSION) + "; nlohmann_json " +
         std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
         std::to_string(NLOHMANN_JSON_VERSION_PATCH);
}

nlohmann::json run_meta(const RunConfig& cfg, const std::string& command) {
  return {{"tool", "ens2"},
          {"command", command},
          {"version", ENS2_VERSION},
          {"versions", versions()},
          {"config_hash", config_hash(cfg)},
          {"seed", cfg.seed}};
}

// Shared options: config file, --set overrides, seed.
struct CommonOptions {
  std::string config_path;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, CommonOptions& o) {
  sub->add_option("-c,--config", o.config_path, "key = value configuration file");
  sub->add_option("--set", o.sets, "override one setting, key=value (repeatable; wins over the file)");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) load_config_file(cfg, o.config_path);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  return cfg;
}

std::vector<core::Series> load_series(const std::string& path, const core::CsvSchema& schema, const char* role) {
  if (path.empty()) throw ConfigError(std::string("no ") + role + " file given");
  return core::load_csv(path, schema);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary);
      if (!file_) throw IoError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
  void finish(const std::string& path) {
    stream().flush();
    if (!stream()) throw IoError("failed writing '" + (path.empty() ? std::string("<stdout>") : path) + "'");
  }

 private:
  std::ofstream file_;
};

void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("failed writing '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("cannot move checkpoint into place at '" + path + "'");
}

const core::Series& pick_series(const std::vector<core::Series>& all, const std::string& id, const std::string& what) {
  if (!id.empty()) {
    for (const auto& s : all) {
      if (s.id() == id) return s;
    }
    throw DataError(what + ": no series with KPI ID '" + id + "'");
  }
  if (all.size() != 1) throw ConfigError(what + " holds " + std::to_string(all.size()) + " series; choose one with --kpi");
  return all.front();
}

// ---- detect ----

struct DetectOptions {
  CommonOptions common;
  std::string train, test, out, format;
  std::size_t threads = 0;
  bool threads_set = false;
};

int cmd_detect(DetectOptions& o) {
  RunConfig cfg = resolve_config(o.common);
  if (!o.train.empty()) cfg.train = o.train;
  if (!o.test.empty()) cfg.test = o.test;
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.format.empty()) apply_setting(cfg, "output.format", o.format);
  if (o.threads_set) cfg.threads = o.threads;
  cfg.ensemble.validate();

  const auto train = load_series(cfg.train, cfg.csv, "training");
  const auto test = load_series(cfg.test, cfg.csv, "test");

  std::vector<std::pair<const core::Series*, const core::Series*>> jobs;
  if (train.size() == 1 && test.size() == 1) {
    jobs.emplace_back(&train.front(), &test.front());
  } else {
    for (const auto& t : test) {
      const core::Series* match = nullptr;
      for (const auto& s : train) {
        if (s.id() == t.id()) match = &s;
      }
      if (!match) throw DataError("no training series for KPI ID '" + t.id() + "'");
      jobs.emplace_back(match, &t);
    }
  }

  std::vector<std::vector<Detection>> results(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        const auto pipeline = EnsemblePipeline::fit(*jobs[i].first, cfg.ensemble);
        results[i] = pipeline.detect_batch(*jobs[i].second);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  std::size_t threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min(threads, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const Error& e) {
      throw Error(e.kind(), "KPI '" + jobs[i].second->id() + "': " + e.what());
    }
  }

  Output out(cfg.output);
  auto meta = run_meta(cfg, "detect");
  meta["series"] = jobs.size();
  if (cfg.format == OutputFormat::jsonl) {
    out.stream() << nlohmann::json{{"meta", meta}}.dump() << '\n';
    for (const auto& r : results) ensemble::write_jsonl(out.stream(), r);
  } else {
    for (const auto& [k, v] : meta.items()) out.stream() << "# " << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
    std::vector<std::string> names;
    for (auto k : cfg.ensemble.learners) names.emplace_back(ensemble::to_string(k));
    std::vector<Detection> all;
    for (const auto& r : results) all.insert(all.end(), r.begin(), r.end());
    ensemble::write_csv(out.stream(), all, names);
  }
  out.finish(cfg.output);
  return kExitOk;
}

// ---- stream ----

struct StreamOptions {
  CommonOptions common;
  std::string train, resume, input = "-", checkpoint, kpi, out;
  std::size_t checkpoint_at = 0;
};

int cmd_stream(StreamOptions& o) {
  RunConfig cfg = resolve_config(o.common);
  if (!o.train.empty()) cfg.train = o.train;
  if (!o.checkpoint.empty()) cfg.checkpoint = o.checkpoint;
  if (!o.out.empty()) cfg.output = o.out;

  std::optional<EnsemblePipeline> pipeline;
  if (!o.resume.empty()) {
    std::ifstream in(o.resume, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint '" + o.resume + "'");
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError("checkpoint '" + o.resume + "' is corrupt: " + e.what());
    }
    pipeline = EnsemblePipeline::restore(doc);
  } else {
    cfg.ensemble.validate();
    const auto train = load_series(cfg.train, cfg.csv, "training");
    pipeline = EnsemblePipeline::fit(pick_series(train, o.kpi, "training file"), cfg.ensemble);
  }

  std::ifstream file;
  std::istream* in = &std::cin;
  if (o.input != "-") {
    file.open(o.input);
    if (!file) throw IoError("cannot open input '" + o.input + "'");
    in = &file;
  }
  Output out(cfg.output);

  auto save = [&] {
    if (cfg.checkpoint.empty()) return;
    write_file_atomically(cfg.checkpoint, pipeline->checkpoint().dump());
    std::cerr << "stream: checkpoint written to " << cfg.checkpoint << " after " << pipeline->steps() << " steps\n";
  };

  install_handler(SIGUSR1, on_checkpoint_signal);
  install_handler(SIGINT, on_stop_signal);
  install_handler(SIGTERM, on_stop_signal);

  std::size_t processed = 0, malformed = 0, rejected = 0, line_no = 0;
  const auto t0 = std::chrono::steady_clock::now();
  std::string line;
  while (!g_stop_requested) {
    errno = 0;
    if (!std::getline(*in, line)) {
      if (errno == EINTR && !g_stop_requested && !in->eof()) {
        in->clear();
        if (g_checkpoint_requested) {
          g_checkpoint_requested = 0;
          save();
        }
        continue;
      }
      break;
    }
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    core::TimePoint pt;
    try {
      const auto doc = nlohmann::json::parse(line);
      if (!doc.is_object() || !doc.contains("timestamp") || !doc.contains("value") ||
          !doc["timestamp"].is_number_integer() || !doc["value"].is_number()) {
        throw DataError("expected {\"timestamp\": int, \"value\": number}");
      }
      pt.timestamp = doc["timestamp"].get<std::int64_t>();
      pt.value = doc["value"].get<double>();
    } catch (const std::exception& e) {
      ++malformed;
      std::cerr << "stream: line " << line_no << " skipped (malformed): " << e.what() << '\n';
      continue;
    }
    Detection d;
    try {
      d = pipeline->stream_push(pt);
    } catch (const DataError& e) {
      ++rejected;
      std::cerr << "stream: line " << line_no << " rejected: " << e.what() << '\n';
      continue;
    }
    out.stream() << ensemble::to_json(d).dump() << '\n';
    out.stream().flush();
    ++processed;
    if (o.checkpoint_at != 0 && processed == o.checkpoint_at) save();
    if (g_checkpoint_requested) {
      g_checkpoint_requested = 0;
      save();
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  save();
  out.finish(cfg.output);
  const double rate = secs > 0.0 ? static_cast<double>(processed) / secs : 0.0;
  std::cerr << "stream: " << processed << " points in " << secs << " s (" << rate << " pts/s); malformed " << malformed
            << ", rejected " << rejected << "; config " << config_hash(cfg) << '\n';
  return kExitOk;
}

// ---- eval ----

struct EvalOptions {
  CommonOptions common;
  std::string detections, labels, out, ablation;
  std::int64_t t = -1;
};

std::vector<std::string> ordered_learners(const std::vector<Detection>& ds) {
  std::set<std::string> seen;
  for (const auto& d : ds)
    for (const auto& [n, _] : d.per_learner) seen.insert(n);
  std::vector<std::string> out;
  for (const char* n : {"arima", "stl", "lstsvr"}) {
    if (seen.erase(n)) out.emplace_back(n);
  }
  out.insert(out.end(), seen.begin(), seen.end());
  return out;
}

int cmd_eval(EvalOptions& o) {
  RunConfig cfg = resolve_config(o.common);
  if (!o.labels.empty()) cfg.labels = o.labels;
  if (o.t >= 0) cfg.eval_t = o.t;
  if (!o.out.empty()) cfg.output = o.out;
  if (!o.ablation.empty()) apply_setting(cfg, "eval.ablation", o.ablation);
  if (cfg.eval_t < 0) throw ConfigError("eval.T must be >= 0");
  if (o.detections.empty()) throw ConfigError("no detections file given");

  std::ifstream in(o.detections);
  if (!in) throw IoError("cannot open detections file '" + o.detections + "'");
  const auto detections = ensemble::read_detections(in, o.detections);
  const auto labelled = load_series(cfg.labels, cfg.csv, "labels");

  std::map<std::string, std::vector<const Detection*>> by_kpi;
  for (const auto& d : detections) by_kpi[d.kpi_id].push_back(&d);
  const auto learners = ordered_learners(detections);

  struct Variant {
    std::string name;
    std::function<bool(const Detection&)> flagged;
  };
  std::vector<Variant> variants{{"ensemble", [](const Detection& d) { return d.ensemble_verdict; }}};
  for (const auto& x : learners) {
    if (cfg.ablation == "without") {
      std::vector<std::string> rest;
      for (const auto& n : learners)
        if (n != x) rest.push_back(n);
      const std::size_t need = rest.size() / 2 + 1;
      variants.push_back({"without_" + x, [rest, need](const Detection& d) {
                            std::size_t votes = 0;
                            for (const auto& n : rest) {
                              const auto it = d.per_learner.find(n);
                              votes += it != d.per_learner.end() && it->second.verdict == evt::Verdict::anomaly;
                            }
                            return !rest.empty() && votes >= need;
                          }});
    } else if (cfg.ablation == "only") {
      variants.push_back({"only_" + x, [x](const Detection& d) {
                            const auto it = d.per_learner.find(x);
                            return it != d.per_learner.end() && it->second.verdict == evt::Verdict::anomaly;
                          }});
    }
  }

  std::vector<std::array<std::size_t, 3>> pooled(variants.size(), {0, 0, 0});
  nlohmann::json per_series = nlohmann::json::object();
  for (const auto& [kpi, ds] : by_kpi) {
    const core::Series* truth_series = nullptr;
    for (const auto& s : labelled) {
      if (s.id() == kpi) truth_series = &s;
    }
    if (!truth_series && labelled.size() == 1 && by_kpi.size() == 1) truth_series = &labelled.front();
    if (!truth_series) throw DataError("labels file has no series for KPI ID '" + kpi + "'");
    if (!truth_series->has_labels()) throw DataError("labels file carries no label column for '" + kpi + "'");

    std::map<std::int64_t, bool> label_at;
    for (const auto& p : truth_series->points()) label_at[p.timestamp] = p.label.value_or(false);
    const std::int64_t t_first = truth_series->points().front().timestamp;
    const std::int64_t step = truth_series->interval();
    std::vector<std::int64_t> truth;
    for (const auto* d : ds) {
      const auto it = label_at.find(d->timestamp);
      if (it == label_at.end()) {
        throw DataError("detection at timestamp " + std::to_string(d->timestamp) + " for '" + kpi +
                        "' has no row in the labels file");
      }
      if (it->second) truth.push_back((d->timestamp - t_first) / step);
    }
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t v = 0; v < variants.size(); ++v) {
      std::vector<std::int64_t> pred;
      for (const auto* d : ds) {
        if (variants[v].flagged(*d)) pred.push_back((d->timestamp - t_first) / step);
      }
      const auto r = diagnostics::windowed_prf(pred, truth, cfg.eval_t);
      pooled[v][0] += r.tp;
      pooled[v][1] += r.fp;
      pooled[v][2] += r.fn;
      auto j = diagnostics::to_json(r);
      j["name"] = variants[v].name;
      rows.push_back(j);
    }
    per_series[kpi] = rows;
  }

  nlohmann::json results = nlohmann::json::array();
  for (std::size_t v = 0; v < variants.size(); ++v) {
    auto j = diagnostics::to_json(diagnostics::make_eval_result(pooled[v][0], pooled[v][1], pooled[v][2], cfg.eval_t));
    j["name"] = variants[v].name;
    results.push_back(j);
  }
  nlohmann::json report = {{"meta", run_meta(cfg, "eval")},
                           {"T", cfg.eval_t},
                           {"ablation", cfg.ablation},
                           {"results", results},
                           {"per_series", per_series}};
  Output out(cfg.output);
  out.stream() << report.dump(2) << '\n';
  out.finish(cfg.output);
  return kExitOk;
}

// ---- synth ----

struct SynthOptions {
  CommonOptions common;
  std::string out, test_out;
  std::size_t split_at = 0;
  std::optional<std::size_t> periods, period_len, anomalies;
  std::optional<double> noise;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> start;
};

int cmd_synth(SynthOptions& o) {
  RunConfig cfg = resolve_config(o.common);
  auto& s = cfg.synth;
  if (o.periods) s.periods = *o.periods;
  if (o.period_len) s.period_len = *o.period_len;
  if (o.anomalies) s.anomalies = *o.anomalies;
  if (o.noise) s.noise_sigma = *o.noise;
  if (o.seed) cfg.seed = *o.seed;
  if (o.start) s.start = *o.start;
  if (!o.out.empty()) cfg.output = o.out;

  core::SyntheticOptions opts;
  opts.periods = s.periods;
  opts.period_len = s.period_len;
  opts.noise_sigma = s.noise_sigma;
  opts.seed = cfg.seed;
  opts.start_timestamp = s.start;
  opts.interval = s.interval;
  opts.id = s.id;
  const std::size_t n = s.periods * s.period_len;
  if (s.anomalies > 0) {
    const std::size_t end = s.anomaly_end == 0 ? n : s.anomaly_end;
    // Spike placement draws from its own stream so the noise does not depend on it.
    opts.anomalies = core::random_spikes(s.anomalies, s.anomaly_begin, end, s.min_gap, s.magnitude_min,
                                         s.magnitude_max, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  }
  const auto series = core::generate_synthetic(opts);

  if (o.split_at > 0) {
    if (o.split_at >= series.size()) throw ConfigError("--split-at must be inside the series");
    if (o.test_out.empty()) throw ConfigError("--split-at needs --test-out");
    Output train_out(cfg.output);
    core::write_csv(train_out.stream(), {series.slice(0, o.split_at)}, cfg.csv);
    train_out.finish(cfg.output);
    Output test_out(o.test_out);
    core::write_csv(test_out.stream(), {series.slice(o.split_at, series.size())}, cfg.csv);
    test_out.finish(o.test_out);
  } else {
    Output out(cfg.output);
    core::write_csv(out.stream(), {series}, cfg.csv);
    out.finish(cfg.output);
  }
  return kExitOk;
}

// ---- entropy ----

struct EntropyOptions {
  CommonOptions common;
  std::string in, out, kpi;
  std::optional<std::size_t> window, order;
};

int cmd_entropy(EntropyOptions& o) {
  RunConfig cfg = resolve_config(o.common);
  if (o.window) cfg.entropy_window = *o.window;
  if (o.order) cfg.entropy_order = *o.order;
  if (!o.out.empty()) cfg.output = o.out;
  const auto all = load_series(o.in, cfg.csv, "input");
  const auto& series = pick_series(all, o.kpi, "input file");
  const auto values = series.values();
  const auto profile = diagnostics::permutation_entropy(values, cfg.entropy_order, cfg.entropy_window);
  Output out(cfg.output);
  diagnostics::write_overlay_csv(out.stream(), diagnostics::entropy_overlay(series, profile));
  out.finish(cfg.output);
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Ensemble anomaly detection for KPI time series"};
  app.set_version_flag("--version", versions());
  app.require_subcommand(1);

  DetectOptions det;
  auto* detect = app.add_subcommand("detect", "fit on a training CSV and score a test CSV");
  add_common(detect, det.common);
  detect->add_option("--train", det.train, "training CSV");
  detect->add_option("--test", det.test, "test CSV");
  detect->add_option("-o,--out", det.out, "output file (default stdout)");
  detect->add_option("--format", det.format, "jsonl or csv");
  detect->add_option("--threads", det.threads, "parallel series (0: all cores)")->each([&](const std::string&) {
    det.threads_set = true;
  });

  StreamOptions str;
  auto* stream = app.add_subcommand("stream", "score JSON-lines points from stdin or a file");
  add_common(stream, str.common);
  stream->add_option("--train", str.train, "training CSV to fit from");
  stream->add_option("--resume", str.resume, "checkpoint to resume from");
  stream->add_option("--input", str.input, "input JSON-lines file (default stdin)");
  stream->add_option("--checkpoint", str.checkpoint, "checkpoint path (written on SIGUSR1, SIGINT/SIGTERM and at end)");
  stream->add_option("--checkpoint-at", str.checkpoint_at, "also write the checkpoint after this many points");
  stream->add_option("--kpi", str.kpi, "KPI ID to fit when the training file holds several");
  stream->add_option("-o,--out", str.out, "output file (default stdout)");

  EvalOptions ev;
  auto* eval = app.add_subcommand("eval", "windowed precision/recall/F1 of a detections file");
  add_common(eval, ev.common);
  eval->add_option("--detections", ev.detections, "detections file (jsonl or csv)")->required();
  eval->add_option("--labels", ev.labels, "labelled CSV");
  eval->add_option("-T,--T", ev.t, "match window in samples");
  eval->add_option("--ablation", ev.ablation, "without, only or none");
  eval->add_option("-o,--out", ev.out, "report file (default stdout)");

  SynthOptions syn;
  auto* synth = app.add_subcommand("synth", "generate the noisy sine dataset with injected spikes");
  add_common(synth, syn.common);
  synth->add_option("-o,--out", syn.out, "output CSV (default stdout)");
  synth->add_option("--test-out", syn.test_out, "second CSV for the points from --split-at on");
  synth->add_option("--split-at", syn.split_at, "split index");
  synth->add_option("--periods", syn.periods, "number of periods");
  synth->add_option("--period-len", syn.period_len, "samples per period");
  synth->add_option("--noise", syn.noise, "Gaussian noise sigma");
  synth->add_option("--anomalies", syn.anomalies, "number of injected spikes");
  synth->add_option("--seed", syn.seed, "random seed");
  synth->add_option("--start", syn.start, "first timestamp");

  EntropyOptions ent;
  auto* entropy = app.add_subcommand("entropy", "sliding permutation entropy overlay");
  add_common(entropy, ent.common);
  entropy->add_option("--in", ent.in, "input CSV")->required();
  entropy->add_option("-o,--out", ent.out, "output CSV (default stdout)");
  entropy->add_option("-w,--window", ent.window, "window length");
  entropy->add_option("--order", ent.order, "pattern order");
  entropy->add_option("--kpi", ent.kpi, "KPI ID when the file holds several");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*detect) return cmd_detect(det);
    if (*stream) return cmd_stream(str);
    if (*eval) return cmd_eval(ev);
    if (*synth) return cmd_synth(syn);
    if (*entropy) return cmd_entropy(ent);
  } catch (const Error& e) {
    std::cerr << "ens2: error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ens2: unexpected error: " << e.what() << '\n';
    return kExitUnexpected;
  }
  return kExitConfig;
}

}  // namespace ens2::cli
