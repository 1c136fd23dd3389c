#include "ens2/core/series.hpp"

#include <cmath>

#include "ens2/common/error.hpp"

namespace ens2::core {

Series::Series(std::string id, std::vector<TimePoint> points, std::int64_t interval)
    : id_(std::move(id)), points_(std::move(points)), interval_(interval) {
  if (points_.empty()) throw InvalidArgument("series '" + id_ + "' is empty");
  if (interval_ <= 0) throw InvalidArgument("series '" + id_ + "' has non-positive interval");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].value)) {
      throw DataError("series '" + id_ + "': non-finite value at position " + std::to_string(i));
    }
    if (i == 0) continue;
    const auto gap = points_[i].timestamp - points_[i - 1].timestamp;
    if (gap <= 0) {
      throw DataError("series '" + id_ + "': timestamps not strictly increasing at " +
                      std::to_string(points_[i].timestamp));
    }
    if (gap % interval_ != 0) {
      throw DataError("series '" + id_ + "': gap of " + std::to_string(gap) +
                      " s is not a multiple of the interval " + std::to_string(interval_));
    }
  }
}

std::vector<double> Series::values() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.value);
  return out;
}

bool Series::has_labels() const {
  for (const auto& p : points_) {
    if (p.label.has_value()) return true;
  }
  return false;
}

std::vector<std::size_t> Series::anomaly_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].label.value_or(false)) out.push_back(i);
  }
  return out;
}

Series Series::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > points_.size()) {
    throw InvalidArgument("series slice [" + std::to_string(begin) + ", " + std::to_string(end) +
                          ") out of range");
  }
  return Series(id_, std::vector<TimePoint>(points_.begin() + static_cast<std::ptrdiff_t>(begin),
                                            points_.begin() + static_cast<std::ptrdiff_t>(end)),
                interval_);
}

Series Series::with_values(std::span<const double> values) const {
  if (values.size() != points_.size()) throw InvalidArgument("with_values: length mismatch");
  auto pts = points_;
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i].value = values[i];
  return Series(id_, std::move(pts), interval_);
}

std::vector<std::size_t> Series::segment_starts() const {
  std::vector<std::size_t> starts{0};
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (points_[i].timestamp - points_[i - 1].timestamp != interval_) starts.push_back(i);
  }
  return starts;
}

}  // namespace ens2::core
