#include "ens2/core/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "ens2/common/error.hpp"

namespace ens2::core {
namespace {

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string row_error(const std::string& source, std::size_t line, const std::string& what) {
  return source + ": malformed row " + std::to_string(line) + ": " + what;
}

std::int64_t parse_timestamp(const std::string& field, const std::string& source, std::size_t line) {
  std::int64_t ts = 0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, ts);
  if (ec == std::errc{} && ptr == end) return ts;
  // Accept integral values written with a fractional part, e.g. "1500000000.0".
  double d = 0.0;
  auto [dptr, dec] = std::from_chars(field.data(), end, d);
  if (dec == std::errc{} && dptr == end && std::isfinite(d) && d == std::floor(d)) {
    return static_cast<std::int64_t>(d);
  }
  throw DataError(row_error(source, line, "unparseable timestamp '" + field + "'"));
}

double parse_value(const std::string& field, const std::string& source, std::size_t line) {
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc{} || ptr != end) {
    throw DataError(row_error(source, line, "unparseable value '" + field + "'"));
  }
  if (!std::isfinite(v)) throw DataError(row_error(source, line, "non-finite value '" + field + "'"));
  return v;
}

std::optional<bool> parse_label(const std::string& field, const std::string& source, std::size_t line) {
  if (field.empty()) return std::nullopt;
  if (field == "1" || field == "true" || field == "True" || field == "1.0") return true;
  if (field == "0" || field == "false" || field == "False" || field == "0.0") return false;
  throw DataError(row_error(source, line, "label must be 0/1, got '" + field + "'"));
}

std::int64_t modal_gap(const std::vector<TimePoint>& pts, std::int64_t fallback) {
  if (pts.size() < 2) return fallback;
  std::map<std::int64_t, std::size_t> counts;
  for (std::size_t i = 1; i < pts.size(); ++i) ++counts[pts[i].timestamp - pts[i - 1].timestamp];
  std::int64_t best = 0;
  std::size_t best_count = 0;
  for (const auto& [gap, count] : counts) {  // ascending, so ties pick the smaller gap
    if (count > best_count) {
      best = gap;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(trim(cur));
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  fields.push_back(trim(cur));
  return fields;
}

std::vector<Series> read_csv(std::istream& in, const CsvSchema& schema, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) throw DataError(source + ": missing header row");
  if (!header.empty() && header[0].rfind("\xEF\xBB\xBF", 0) == 0) header[0].erase(0, 3);

  const auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const auto ts_col = find_col(schema.timestamp_column);
  const auto val_col = find_col(schema.value_column);
  if (!ts_col) throw DataError(source + ": missing column '" + schema.timestamp_column + "'");
  if (!val_col) throw DataError(source + ": missing column '" + schema.value_column + "'");
  const auto label_col = find_col(schema.label_column);
  const auto id_col = find_col(schema.id_column);

  std::map<std::string, std::vector<TimePoint>> groups;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw DataError(row_error(source, line_no,
                                "expected " + std::to_string(header.size()) + " fields, got " +
                                    std::to_string(fields.size())));
    }
    TimePoint p;
    p.timestamp = parse_timestamp(fields[*ts_col], source, line_no);
    p.value = parse_value(fields[*val_col], source, line_no);
    if (label_col) p.label = parse_label(fields[*label_col], source, line_no);
    const std::string id = id_col ? fields[*id_col] : schema.default_id;
    groups[id].push_back(p);
  }

  std::vector<Series> out;
  for (auto& [id, pts] : groups) {
    std::sort(pts.begin(), pts.end(),
              [](const TimePoint& a, const TimePoint& b) { return a.timestamp < b.timestamp; });
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (pts[i].timestamp == pts[i - 1].timestamp) {
        throw DataError(source + ": duplicate timestamp " + std::to_string(pts[i].timestamp) +
                        " for KPI '" + id + "'");
      }
    }
    const auto interval = modal_gap(pts, schema.default_interval);
    out.emplace_back(id, std::move(pts), interval);
  }
  return out;
}

std::vector<Series> load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_csv(in, schema, path.string());
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_csv(std::ostream& out, const std::vector<Series>& series, const CsvSchema& schema) {
  bool labels = false;
  for (const auto& s : series) labels = labels || s.has_labels();
  out << csv_quote(schema.timestamp_column) << ',' << csv_quote(schema.value_column);
  if (labels) out << ',' << csv_quote(schema.label_column);
  out << ',' << csv_quote(schema.id_column) << '\n';
  for (const auto& s : series) {
    const auto id = csv_quote(s.id());
    for (const auto& p : s.points()) {
      out << p.timestamp << ',' << format_double(p.value);
      if (labels) out << ',' << (p.label ? (*p.label ? "1" : "0") : "");
      out << ',' << id << '\n';
    }
  }
}

void save_csv(const std::filesystem::path& path, const std::vector<Series>& series,
              const CsvSchema& schema) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_csv(out, series, schema);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace ens2::core
