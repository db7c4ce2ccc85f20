#include "sitmp/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sitmp {

void DynamicBounds::validate() const {
  if (!(v_max > 0.0) || !(a_max > 0.0))
    throw std::invalid_argument("dynamic bounds must be positive");
}

namespace {

// Peak speed and acceleration-phase duration of the optimal profile.
struct Profile {
  double v_peak;
  double t_acc;
  double t_total;
};

Profile profileFor(double d, const DynamicBounds& b) {
  if (d <= b.v_max * b.v_max / b.a_max) {
    const double t_acc = std::sqrt(d / b.a_max);
    return {b.a_max * t_acc, t_acc, 2.0 * t_acc};
  }
  const double t_acc = b.v_max / b.a_max;
  return {b.v_max, t_acc, d / b.v_max + t_acc};
}

}  // namespace

double minTravelTime(double distance, const DynamicBounds& bounds) {
  if (distance < 0.0) throw std::invalid_argument("minTravelTime: negative distance");
  bounds.validate();
  return profileFor(distance, bounds).t_total;
}

double trapezoidPosition(double distance, const DynamicBounds& bounds, double t) {
  if (distance <= 0.0 || t <= 0.0) return 0.0;
  const Profile p = profileFor(distance, bounds);
  if (t >= p.t_total) return distance;
  const double a = bounds.a_max;
  if (t <= p.t_acc) return 0.5 * a * t * t;
  const double s_acc = 0.5 * a * p.t_acc * p.t_acc;
  const double t_dec = p.t_total - p.t_acc;
  if (t <= t_dec) return s_acc + p.v_peak * (t - p.t_acc);
  const double r = p.t_total - t;
  return std::min(distance, distance - 0.5 * a * r * r);
}

double trapezoidTimeAt(double distance, const DynamicBounds& bounds, double s) {
  if (distance <= 0.0 || s <= 0.0) return 0.0;
  const Profile p = profileFor(distance, bounds);
  if (s >= distance) return p.t_total;
  const double a = bounds.a_max;
  const double s_acc = 0.5 * a * p.t_acc * p.t_acc;
  if (s <= s_acc) return std::sqrt(2.0 * s / a);
  if (s <= distance - s_acc) return p.t_acc + (s - s_acc) / p.v_peak;
  return p.t_total - std::sqrt(2.0 * (distance - s) / a);
}

}  // namespace sitmp
