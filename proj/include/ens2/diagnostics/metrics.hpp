#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <json.hpp>

namespace ens2::diagnostics {

struct ForecastMetrics {
  double mse = 0.0;
  double mae = 0.0;
};

ForecastMetrics forecast_metrics(std::span<const double> actual, std::span<const double> predicted);
void write_metrics_csv(std::ostream& out, const ForecastMetrics& m);

struct EvalResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t t_window = 0;
};

// One-to-one matching of predicted to true anomaly indices: predictions are
// taken in ascending order and each claims the earliest unmatched truth
// within T steps. Duplicate indices count once. Zero denominators give 0.
EvalResult windowed_prf(std::span<const std::int64_t> predicted, std::span<const std::int64_t> truth, std::int64_t t_window);

// Precision, recall and F1 from counts.
EvalResult make_eval_result(std::size_t tp, std::size_t fp, std::size_t fn, std::int64_t t_window);

nlohmann::json to_json(const EvalResult& r);

}  // namespace ens2::diagnostics
