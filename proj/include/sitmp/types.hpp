#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace sitmp {

using Vec3 = Eigen::Vector3d;

// Error categories. Callers that need to distinguish them catch the concrete
// type; everything derives from std::runtime_error or std::invalid_argument.
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct QueryError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed time window [lo, hi] in seconds.
struct TimeInterval {
  double lo = 0.0;
  double hi = 0.0;

  TimeInterval() = default;
  TimeInterval(double l, double h) : lo(l), hi(h) {
    if (!(std::isfinite(l) && std::isfinite(h)) || l > h)
      throw std::invalid_argument("TimeInterval requires finite lo <= hi");
  }

  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
  bool contains(const TimeInterval& o) const { return o.lo >= lo && o.hi <= hi; }
  double clamp(double t) const { return std::clamp(t, lo, hi); }

  friend bool operator==(const TimeInterval&, const TimeInterval&) = default;
};

}  // namespace sitmp
