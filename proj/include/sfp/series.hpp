#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sfp/errors.hpp"

namespace sfp {

/// Gaps between consecutive events of one individual, in seconds. All
/// entries are strictly positive.
class InterEventSeries {
 public:
  InterEventSeries() = default;

  explicit InterEventSeries(std::vector<double> deltas) : deltas_(std::move(deltas)) {
    for (double d : deltas_) {
      if (!(d > 0.0) || !std::isfinite(d))
        throw DataError("inter-event times must be finite and positive");
    }
  }

  std::span<const double> deltas() const noexcept { return deltas_; }
  std::size_t size() const noexcept { return deltas_.size(); }
  bool empty() const noexcept { return deltas_.empty(); }
  double operator[](std::size_t i) const { return deltas_[i]; }

  auto begin() const noexcept { return deltas_.begin(); }
  auto end() const noexcept { return deltas_.end(); }

  std::vector<double> release() && { return std::move(deltas_); }

 private:
  std::vector<double> deltas_;
};

/// One individual's event timestamps in seconds; strictly increasing and
/// starting at or after zero.
class EventSeries {
 public:
  EventSeries() = default;

  EventSeries(std::string individual_id, std::vector<double> timestamps)
      : id_(std::move(individual_id)), timestamps_(std::move(timestamps)) {
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
      const double t = timestamps_[i];
      if (!std::isfinite(t) || t < 0.0)
        throw DataError("timestamps must be finite and nonnegative");
      if (i > 0 && !(t > timestamps_[i - 1]))
        throw DataError("timestamps of '" + id_ + "' are not strictly increasing");
    }
  }

  const std::string& individual_id() const noexcept { return id_; }
  std::span<const double> timestamps() const noexcept { return timestamps_; }
  std::size_t size() const noexcept { return timestamps_.size(); }
  bool empty() const noexcept { return timestamps_.empty(); }

 private:
  std::string id_;
  std::vector<double> timestamps_;
};

/// Prefix sums t0 + sum_{j<=k} delta_j. When a gap is below the resolution
/// of the running sum the timestamp is advanced by one ulp so the result
/// stays strictly increasing.
inline EventSeries intervals_to_timestamps(const InterEventSeries& series,
                                           double t0 = 0.0,
                                           std::string individual_id = {}) {
  if (!(t0 >= 0.0) || !std::isfinite(t0))
    throw ParameterError("t0 must be finite and nonnegative");
  std::vector<double> ts;
  ts.reserve(series.size());
  double t = t0;
  for (double d : series) {
    double next = t + d;
    if (!(next > t)) next = std::nextafter(t, std::numeric_limits<double>::infinity());
    ts.push_back(next);
    t = next;
  }
  return EventSeries(std::move(individual_id), std::move(ts));
}

}  // namespace sfp
