#include "ens2/diagnostics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "ens2/common/error.hpp"
#include "ens2/core/csv.hpp"

namespace ens2::diagnostics {

ForecastMetrics forecast_metrics(std::span<const double> actual, std::span<const double> predicted) {
  if (actual.size() != predicted.size()) {
    throw InvalidArgument("forecast metrics: length mismatch (" + std::to_string(actual.size()) + " vs " +
                          std::to_string(predicted.size()) + ")");
  }
  if (actual.empty()) throw InvalidArgument("forecast metrics: empty input");
  double se = 0.0, ae = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double r = actual[i] - predicted[i];
    se += r * r;
    ae += std::abs(r);
  }
  const double n = static_cast<double>(actual.size());
  return {se / n, ae / n};
}

void write_metrics_csv(std::ostream& out, const ForecastMetrics& m) {
  out << "mse,mae\n" << core::format_double(m.mse) << ',' << core::format_double(m.mae) << '\n';
}

EvalResult make_eval_result(std::size_t tp, std::size_t fp, std::size_t fn, std::int64_t t_window) {
  EvalResult r;
  r.tp = tp;
  r.fp = fp;
  r.fn = fn;
  r.t_window = t_window;
  r.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  r.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

namespace {

std::vector<std::int64_t> sorted_unique(std::span<const std::int64_t> v, const char* what) {
  std::vector<std::int64_t> out(v.begin(), v.end());
  for (auto i : out) {
    if (i < 0) throw InvalidArgument(std::string("windowed_prf: negative ") + what + " index");
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

EvalResult windowed_prf(std::span<const std::int64_t> predicted, std::span<const std::int64_t> truth,
                        std::int64_t t_window) {
  if (t_window < 0) throw InvalidArgument("windowed_prf: T must be >= 0");
  const auto pred = sorted_unique(predicted, "predicted");
  const auto gt = sorted_unique(truth, "truth");
  // Truths before `next` are matched or out of reach of every later prediction.
  std::size_t next = 0, tp = 0;
  for (auto p : pred) {
    while (next < gt.size() && gt[next] < p - t_window) ++next;
    if (next < gt.size() && gt[next] <= p + t_window) {
      ++tp;
      ++next;
    }
  }
  return make_eval_result(tp, pred.size() - tp, gt.size() - tp, t_window);
}

nlohmann::json to_json(const EvalResult& r) {
  return {{"tp", r.tp},
          {"fp", r.fp},
          {"fn", r.fn},
          {"precision", r.precision},
          {"recall", r.recall},
          {"f1", r.f1},
          {"T", r.t_window}};
}

}  // namespace ens2::diagnostics
