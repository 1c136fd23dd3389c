#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ens2/core/csv.hpp"
#include "ens2/ensemble/config.hpp"

namespace ens2::cli {

enum class OutputFormat { jsonl, csv };

struct SynthParams {
  std::size_t periods = 8;
  std::size_t period_len = 1440;
  double noise_sigma = 0.1;
  std::size_t anomalies = 20;
  std::size_t anomaly_begin = 0;
  std::size_t anomaly_end = 0;  // 0: end of the series
  std::size_t min_gap = 50;
  double magnitude_min = 0.8;
  double magnitude_max = 1.2;
  std::int64_t start = 0;
  std::int64_t interval = 60;
  std::string id = "synthetic";
};

// Everything a run needs. Parsed from key = value lines; every key has a
// default (config_text(RunConfig{}) lists them).
struct RunConfig {
  ensemble::EnsembleConfig ensemble;
  std::uint64_t seed = 42;
  OutputFormat format = OutputFormat::jsonl;
  std::string output;       // empty: stdout
  std::string train;
  std::string test;
  std::string labels;
  std::string checkpoint;
  std::int64_t eval_t = 7;
  std::string ablation = "without";  // without | only | none
  std::size_t threads = 0;           // 0: hardware concurrency
  core::CsvSchema csv;
  SynthParams synth;
  std::size_t entropy_window = 60;
  std::size_t entropy_order = 3;
};

// Applies one key = value setting. Throws ConfigError naming the key.
void apply_setting(RunConfig& config, const std::string& key, const std::string& value);
// Blank lines and '#' comments are ignored; later settings win.
void parse_config(RunConfig& config, std::istream& in, const std::string& source);
void load_config_file(RunConfig& config, const std::filesystem::path& path);

// key = value for every setting, sorted by key; parse_config of this text
// reproduces the configuration.
std::vector<std::pair<std::string, std::string>> config_entries(const RunConfig& config);
std::string config_text(const RunConfig& config);
// FNV-1a 64 over the settings that affect results (file paths and the
// thread count excluded), as 16 hex digits.
std::string config_hash(const RunConfig& config);

}  // namespace ens2::cli
