#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens2/evt/pot.hpp"

namespace ens2::ensemble {

struct LearnerOutput {
  double prediction = 0.0;
  double error = 0.0;  // |value - prediction|
  evt::Verdict verdict = evt::Verdict::normal;

  bool operator==(const LearnerOutput&) const = default;
};

struct Thresholds {
  double t = 0.0;
  double z = 0.0;

  bool operator==(const Thresholds&) const = default;
};

// Verdicts for one point. While warming no learner output is produced and
// the verdict is always normal. Thresholds are the ones the point was judged
// against. In error_average mode the shared detector appears under "ensemble".
struct Detection {
  std::string kpi_id;
  std::int64_t index = 0;  // samples since the first training timestamp
  std::int64_t timestamp = 0;
  double value = 0.0;
  bool warming = false;
  bool ensemble_verdict = false;
  std::map<std::string, LearnerOutput> per_learner;
  std::map<std::string, Thresholds> thresholds;

  bool operator==(const Detection&) const = default;
};

inline constexpr const char* kSharedDetector = "ensemble";

nlohmann::json to_json(const Detection& d);
Detection detection_from_json(const nlohmann::json& doc);

// One JSON object per line.
void write_jsonl(std::ostream& out, const std::vector<Detection>& detections);
// Flattened table: one column group (prediction, error, verdict, t, z) per learner.
void write_csv(std::ostream& out, const std::vector<Detection>& detections, const std::vector<std::string>& learners);

// Reads either output format back. Metadata lines ('#' comments, or a JSON
// object with a "meta" key) are skipped.
std::vector<Detection> read_detections(std::istream& in, const std::string& source);

}  // namespace ens2::ensemble
