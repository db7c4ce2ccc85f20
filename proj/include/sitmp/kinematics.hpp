#pragma once

namespace sitmp {

/// Scalar speed and acceleration limits.
struct DynamicBounds {
  double v_max = 2.0;
  double a_max = 2.0;

  void validate() const;
};

/// Time-optimal rest-to-rest duration to cover `distance` with a 1D double
/// integrator: triangular profile below v_max^2/a_max, trapezoidal above.
/// Throws std::invalid_argument for negative distance.
double minTravelTime(double distance, const DynamicBounds& bounds);

/// Distance covered after `t` seconds along the time-optimal rest-to-rest
/// profile for `distance` (clamped to [0, distance]).
double trapezoidPosition(double distance, const DynamicBounds& bounds, double t);

/// Inverse of trapezoidPosition: time at which `s` in [0, distance] is reached.
double trapezoidTimeAt(double distance, const DynamicBounds& bounds, double s);

}  // namespace sitmp
