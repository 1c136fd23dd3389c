#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "ens2/core/series.hpp"

namespace ens2::core {

// Column mapping for KPI CSV files. The default matches the public
// KPI-competition layout.
struct CsvSchema {
  std::string timestamp_column = "timestamp";
  std::string value_column = "value";
  std::string label_column = "label";  // optional in the file
  std::string id_column = "KPI ID";    // optional in the file
  std::string default_id = "series";   // used when the id column is absent
  std::int64_t default_interval = 60;  // used for single-point series
};

// Reads one Series per distinct KPI ID, sorted by id. Rows may appear in any
// order; points are sorted by timestamp and the interval is the modal gap.
std::vector<Series> load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
std::vector<Series> read_csv(std::istream& in, const CsvSchema& schema = {},
                             const std::string& source_name = "<stream>");

// Writes the series using the same schema (label column only when any point
// carries a label; id column always).
void write_csv(std::ostream& out, const std::vector<Series>& series, const CsvSchema& schema = {});
void save_csv(const std::filesystem::path& path, const std::vector<Series>& series,
              const CsvSchema& schema = {});

// Splits one CSV line on commas, honouring double-quoted fields.
std::vector<std::string> split_csv_line(const std::string& line);
// Quotes a field when it contains a comma, quote or newline.
std::string csv_quote(const std::string& field);
// Shortest representation that reads back to the same double.
std::string format_double(double v);

}  // namespace ens2::core
