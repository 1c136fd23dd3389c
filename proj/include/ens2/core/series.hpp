#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ens2::core {

struct TimePoint {
  std::int64_t timestamp = 0;  // epoch seconds
  double value = 0.0;
  std::optional<bool> label;   // true = ground-truth anomaly
};

// An ordered KPI series. Construction validates the invariants: at least one
// point, finite values, strictly increasing timestamps whose gaps are integer
// multiples of the sampling interval.
class Series {
 public:
  Series(std::string id, std::vector<TimePoint> points, std::int64_t interval);

  const std::string& id() const noexcept { return id_; }
  const std::vector<TimePoint>& points() const noexcept { return points_; }
  std::int64_t interval() const noexcept { return interval_; }
  std::size_t size() const noexcept { return points_.size(); }
  const TimePoint& operator[](std::size_t i) const { return points_[i]; }

  std::vector<double> values() const;
  bool has_labels() const;
  // Indices of points labelled anomalous.
  std::vector<std::size_t> anomaly_indices() const;

  // Sub-series [begin, end). Keeps id and interval.
  Series slice(std::size_t begin, std::size_t end) const;
  // Same timestamps and labels, new values.
  Series with_values(std::span<const double> values) const;

  // Start offsets of the contiguous runs (no missing samples) in this series.
  // Always begins with 0.
  std::vector<std::size_t> segment_starts() const;

 private:
  std::string id_;
  std::vector<TimePoint> points_;
  std::int64_t interval_;
};

}  // namespace ens2::core
