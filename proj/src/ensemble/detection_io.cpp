#include <charconv>
#include <istream>
#include <ostream>
#include <set>

#include "ens2/common/error.hpp"
#include "ens2/core/csv.hpp"
#include "ens2/ensemble/detection.hpp"

namespace ens2::ensemble {

nlohmann::json to_json(const Detection& d) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [name, o] : d.per_learner) {
    per[name] = {{"prediction", o.prediction}, {"error", o.error}, {"verdict", evt::to_string(o.verdict)}};
  }
  nlohmann::json thr = nlohmann::json::object();
  for (const auto& [name, t] : d.thresholds) thr[name] = {{"t", t.t}, {"z", t.z}};
  return {
      {"kpi_id", d.kpi_id},
      {"index", d.index},
      {"timestamp", d.timestamp},
      {"value", d.value},
      {"warming", d.warming},
      {"ensemble_verdict", d.ensemble_verdict},
      {"per_learner", per},
      {"thresholds", thr},
  };
}

Detection detection_from_json(const nlohmann::json& doc) {
  Detection d;
  try {
    d.kpi_id = doc.at("kpi_id").get<std::string>();
    d.index = doc.at("index").get<std::int64_t>();
    d.timestamp = doc.at("timestamp").get<std::int64_t>();
    d.value = doc.at("value").get<double>();
    d.warming = doc.at("warming").get<bool>();
    d.ensemble_verdict = doc.at("ensemble_verdict").get<bool>();
    for (const auto& [name, o] : doc.at("per_learner").items()) {
      d.per_learner[name] = {o.at("prediction").get<double>(), o.at("error").get<double>(),
                             evt::verdict_from_string(o.at("verdict").get<std::string>())};
    }
    for (const auto& [name, t] : doc.at("thresholds").items()) {
      d.thresholds[name] = {t.at("t").get<double>(), t.at("z").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed detection record: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw DataError(std::string("malformed detection record: ") + e.what());
  }
  return d;
}

void write_jsonl(std::ostream& out, const std::vector<Detection>& detections) {
  for (const auto& d : detections) out << to_json(d).dump() << '\n';
}

void write_csv(std::ostream& out, const std::vector<Detection>& detections, const std::vector<std::string>& learners) {
  bool shared = false;
  for (const auto& d : detections) shared = shared || d.thresholds.count(kSharedDetector) > 0;
  out << "kpi_id,index,timestamp,value,warming,ensemble_verdict";
  for (const auto& n : learners) out << ',' << n << "_prediction," << n << "_error," << n << "_verdict," << n << "_t," << n << "_z";
  if (shared) out << ',' << kSharedDetector << "_t," << kSharedDetector << "_z";
  out << '\n';
  for (const auto& d : detections) {
    out << core::csv_quote(d.kpi_id) << ',' << d.index << ',' << d.timestamp << ',' << core::format_double(d.value) << ','
        << (d.warming ? 1 : 0) << ',' << (d.ensemble_verdict ? 1 : 0);
    for (const auto& n : learners) {
      const auto o = d.per_learner.find(n);
      if (o != d.per_learner.end()) {
        out << ',' << core::format_double(o->second.prediction) << ',' << core::format_double(o->second.error) << ','
            << evt::to_string(o->second.verdict);
      } else {
        out << ",,,";
      }
      const auto t = d.thresholds.find(n);
      if (t != d.thresholds.end()) {
        out << ',' << core::format_double(t->second.t) << ',' << core::format_double(t->second.z);
      } else {
        out << ",,";
      }
    }
    if (shared) {
      const auto t = d.thresholds.find(kSharedDetector);
      if (t != d.thresholds.end()) {
        out << ',' << core::format_double(t->second.t) << ',' << core::format_double(t->second.z);
      } else {
        out << ",,";
      }
    }
    out << '\n';
  }
}

namespace {

bool is_meta_line(const std::string& line) {
  if (line.empty() || line[0] == '#') return true;
  return false;
}

double csv_double(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw DataError(where + ": bad number '" + s + "'");
  return v;
}

std::int64_t csv_int(const std::string& s, const std::string& where) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) throw DataError(where + ": bad integer '" + s + "'");
  return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<Detection> read_detections(std::istream& in, const std::string& source) {
  std::vector<Detection> out;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  bool csv = false;
  bool json = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_meta_line(line)) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    if (!csv && !json) {
      if (line[0] == '{') {
        json = true;
      } else {
        csv = true;
        header = core::split_csv_line(line);
        continue;
      }
    }
    if (json) {
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw DataError(where + ": invalid JSON: " + e.what());
      }
      if (doc.contains("meta")) continue;
      try {
        out.push_back(detection_from_json(doc));
      } catch (const DataError& e) {
        throw DataError(where + ": " + e.what());
      }
      continue;
    }
    const auto cells = core::split_csv_line(line);
    if (cells.size() != header.size()) throw DataError(where + ": expected " + std::to_string(header.size()) + " columns");
    Detection d;
    std::map<std::string, LearnerOutput> partial;
    std::set<std::string> have_output;
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto& h = header[i];
      const auto& c = cells[i];
      if (h == "kpi_id") d.kpi_id = c;
      else if (h == "index") d.index = csv_int(c, where);
      else if (h == "timestamp") d.timestamp = csv_int(c, where);
      else if (h == "value") d.value = csv_double(c, where);
      else if (h == "warming") d.warming = c == "1";
      else if (h == "ensemble_verdict") d.ensemble_verdict = c == "1";
      else if (c.empty()) continue;
      else if (ends_with(h, "_prediction")) {
        const auto n = h.substr(0, h.size() - 11);
        partial[n].prediction = csv_double(c, where);
        have_output.insert(n);
      } else if (ends_with(h, "_error")) {
        partial[h.substr(0, h.size() - 6)].error = csv_double(c, where);
      } else if (ends_with(h, "_verdict")) {
        try {
          partial[h.substr(0, h.size() - 8)].verdict = evt::verdict_from_string(c);
        } catch (const InvalidArgument& e) {
          throw DataError(where + ": " + e.what());
        }
      } else if (ends_with(h, "_t")) {
        d.thresholds[h.substr(0, h.size() - 2)].t = csv_double(c, where);
      } else if (ends_with(h, "_z")) {
        d.thresholds[h.substr(0, h.size() - 2)].z = csv_double(c, where);
      }
    }
    for (const auto& n : have_output) d.per_learner[n] = partial[n];
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace ens2::ensemble
