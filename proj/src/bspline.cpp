#include "sitmp/bspline.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sitmp {

UniformBSpline::UniformBSpline(CtrlPoints ctrl, double t_s, double t0) : t0_(t0) {
  if (!std::isfinite(t0)) throw std::invalid_argument("spline t0 must be finite");
  setKnotSpan(t_s);
  setCtrl(std::move(ctrl));
}

void UniformBSpline::setCtrl(CtrlPoints ctrl) {
  if (ctrl.cols() < kDegree + 1)
    throw std::invalid_argument("a cubic B-spline needs at least 4 control points");
  ctrl_ = std::move(ctrl);
}

void UniformBSpline::setKnotSpan(double t_s) {
  if (!(t_s > 0.0) || !std::isfinite(t_s))
    throw std::invalid_argument("knot span must be positive");
  t_s_ = t_s;
}

std::pair<int, double> UniformBSpline::locate(double t) const {
  constexpr double eps = 1e-9;
  if (!(t >= t0_ - eps && t <= tEnd() + eps))
    throw QueryError("spline queried at t = " + std::to_string(t) + " outside [" +
                     std::to_string(t0_) + ", " + std::to_string(tEnd()) + "]");
  const int segments = size() - kDegree;
  const double x = (t - t0_) / t_s_;
  const int j = std::clamp(static_cast<int>(std::floor(x)), 0, segments - 1);
  return {j, std::clamp(x - j, 0.0, 1.0)};
}

std::array<double, 4> uniformBasis(int degree, double u) {
  const double v = 1.0 - u;
  switch (degree) {
    case 0:
      return {1.0, 0.0, 0.0, 0.0};
    case 1:
      return {v, u, 0.0, 0.0};
    case 2:
      return {0.5 * v * v, 0.5 + u * v, 0.5 * u * u, 0.0};
    case 3: {
      const double u2 = u * u;
      const double u3 = u2 * u;
      return {v * v * v / 6.0, (3.0 * u3 - 6.0 * u2 + 4.0) / 6.0,
              (-3.0 * u3 + 3.0 * u2 + 3.0 * u + 1.0) / 6.0, u3 / 6.0};
    }
    default:
      throw std::invalid_argument("basis degree must be 0..3");
  }
}

Vec3 UniformBSpline::evaluate(double t, int order) const {
  if (order < 0 || order > kDegree) throw std::invalid_argument("derivative order must be 0..3");
  const auto [j, u] = locate(t);
  // Differencing lowers the degree by one and keeps segment j aligned with
  // the same starting index.
  CtrlPoints d = ctrl_.middleCols(j, kDegree + 1);
  for (int k = 0; k < order; ++k) {
    CtrlPoints next = (d.rightCols(d.cols() - 1) - d.leftCols(d.cols() - 1)) / t_s_;
    d = std::move(next);
  }
  const auto w = uniformBasis(kDegree - order, u);
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < d.cols(); ++k) out += w[k] * d.col(k);
  return out;
}

DerivativeCtrlPoints derivativeCtrlPoints(const CtrlPoints& q, double t_s) {
  if (q.cols() < 4) throw std::invalid_argument("derivative control points need N >= 4");
  if (!(t_s > 0.0)) throw std::invalid_argument("knot span must be positive");
  auto diff = [t_s](const CtrlPoints& p) -> CtrlPoints {
    return (p.rightCols(p.cols() - 1) - p.leftCols(p.cols() - 1)) / t_s;
  };
  DerivativeCtrlPoints out;
  out.V = diff(q);
  out.A = diff(out.V);
  out.J = diff(out.A);
  return out;
}

UniformBSpline fitInitial(const TimedPath& tp, double t_s) {
  if (!(t_s > 0.0)) throw std::invalid_argument("knot span must be positive");
  const double d = tp.duration();
  if (d < 4.0 * t_s - 1e-12)
    throw std::invalid_argument("timed path is shorter than four knot spans");
  const int spans = static_cast<int>(std::ceil(d / t_s - 1e-9));
  const int n = spans + 2 * UniformBSpline::kDegree;
  CtrlPoints q(3, n);
  for (int i = 0; i < n; ++i) q.col(i) = tp.position(fitSampleTime(tp, t_s, i));
  for (int i = 0; i < UniformBSpline::kDegree; ++i) {
    q.col(i) = tp.vertices.front();
    q.col(n - 1 - i) = tp.vertices.back();
  }
  return UniformBSpline(std::move(q), t_s, tp.start());
}

double controlCostIntegral(const UniformBSpline& s) {
  const auto d = derivativeCtrlPoints(s);
  return d.J.colwise().squaredNorm().sum() * s.knotSpan();
}

}  // namespace sitmp
