#pragma once

#include <array>

#include <Eigen/Core>

#include "sitmp/timed_path.hpp"
#include "sitmp/types.hpp"

namespace sitmp {

using CtrlPoints = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Cubic uniform B-spline. Control point i (0-based) sits at knot time
/// t0 + (i - 1) * t_s; the curve is defined on [t0, t0 + (N - 3) * t_s].
class UniformBSpline {
 public:
  static constexpr int kDegree = 3;

  UniformBSpline() = default;
  /// Throws std::invalid_argument for fewer than 4 points or t_s <= 0.
  UniformBSpline(CtrlPoints ctrl, double t_s, double t0);

  const CtrlPoints& ctrl() const { return ctrl_; }
  void setCtrl(CtrlPoints ctrl);
  int size() const { return static_cast<int>(ctrl_.cols()); }
  double knotSpan() const { return t_s_; }
  void setKnotSpan(double t_s);
  double t0() const { return t0_; }
  double tEnd() const { return t0_ + (size() - kDegree) * t_s_; }
  double duration() const { return tEnd() - t0_; }
  double knotTime(int i) const { return t0_ + (i - 1) * t_s_; }

  /// Segment index and local parameter u in [0, 1] for time t.
  /// Throws QueryError outside [t0, tEnd].
  std::pair<int, double> locate(double t) const;

  /// Position (order 0) up to jerk (order 3).
  Vec3 evaluate(double t, int order = 0) const;

 private:
  CtrlPoints ctrl_;
  double t_s_ = 1.0;
  double t0_ = 0.0;
};

/// Uniform B-spline basis of degree `degree` (0..3) at local parameter u.
/// Only the first degree + 1 entries are used.
std::array<double, 4> uniformBasis(int degree, double u);

struct DerivativeCtrlPoints {
  CtrlPoints V;
  CtrlPoints A;
  CtrlPoints J;
};

/// V_i = (Q_{i+1} - Q_i) / t_s, and likewise for A from V and J from A.
/// Throws std::invalid_argument for fewer than 4 points.
DerivativeCtrlPoints derivativeCtrlPoints(const CtrlPoints& q, double t_s);
inline DerivativeCtrlPoints derivativeCtrlPoints(const UniformBSpline& s) {
  return derivativeCtrlPoints(s.ctrl(), s.knotSpan());
}

/// Number of spans the fitted curve hovers at the start before following the
/// path; the first and last kDegree control points are pinned to the endpoints.
inline constexpr int kFitLead = UniformBSpline::kDegree - 1;

/// Path time the control point i was sampled from in fitInitial().
inline double fitSampleTime(const TimedPath& tp, double t_s_initial, int i) {
  return tp.start() + (i - 1 - kFitLead) * t_s_initial;
}

/// Initial guess from a timed path: control point i takes the path position
/// at fitSampleTime(), so the curve starts at rest at x_s, follows the path
/// delayed by kFitLead spans and ends at rest at x_g.
/// Throws std::invalid_argument if the path is shorter than 4 * t_s.
UniformBSpline fitInitial(const TimedPath& tp, double t_s);

/// Integral of the squared jerk over the span: sum of |J_i|^2 * t_s.
double controlCostIntegral(const UniformBSpline& s);

}  // namespace sitmp
