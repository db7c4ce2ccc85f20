#include "sitmp/optimizer.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace sitmp {

void CostWeights::validate() const {
  if (!(lambda_c >= 0.0 && lambda_od >= 0.0 && lambda_ct >= 0.0 && lambda_f >= 0.0))
    throw ConfigError("cost weights must be nonnegative");
  if (!(d_th > 0.0)) throw ConfigError("d_th must be positive");
  if (samples_per_span < 1) throw ConfigError("samples_per_span must be >= 1");
  bounds.validate();
}

CostGrad costControl(const CtrlPoints& q, double t_s) {
  const auto d = derivativeCtrlPoints(q, t_s);
  CostGrad out{0.0, CtrlPoints::Zero(3, q.cols())};
  const double k = 1.0 / (t_s * t_s * t_s);
  for (int i = 0; i < d.J.cols(); ++i) {
    out.value += d.J.col(i).squaredNorm();
    const Vec3 g = 2.0 * d.J.col(i) * k;
    out.grad.col(i) -= g;
    out.grad.col(i + 1) += 3.0 * g;
    out.grad.col(i + 2) -= 3.0 * g;
    out.grad.col(i + 3) += g;
  }
  return out;
}

CostGrad costFeasibility(const CtrlPoints& q, double t_s, const DynamicBounds& bounds) {
  const auto d = derivativeCtrlPoints(q, t_s);
  CostGrad out{0.0, CtrlPoints::Zero(3, q.cols())};
  for (int i = 0; i < d.V.cols(); ++i)
    for (int k = 0; k < 3; ++k) {
      const double v = d.V(k, i);
      const double e = std::abs(v) - bounds.v_max;
      if (e <= 0.0) continue;
      out.value += e * e;
      const double g = 2.0 * e * (v > 0 ? 1.0 : -1.0) / t_s;
      out.grad(k, i + 1) += g;
      out.grad(k, i) -= g;
    }
  const double t2 = t_s * t_s;
  for (int i = 0; i < d.A.cols(); ++i)
    for (int k = 0; k < 3; ++k) {
      const double a = d.A(k, i);
      const double e = std::abs(a) - bounds.a_max;
      if (e <= 0.0) continue;
      out.value += e * e;
      const double g = 2.0 * e * (a > 0 ? 1.0 : -1.0) / t2;
      out.grad(k, i) += g;
      out.grad(k, i + 1) -= 2.0 * g;
      out.grad(k, i + 2) += g;
    }
  return out;
}

CostGrad costDynamicObstacles(const UniformBSpline& s, const Environment& env, double d_th,
                              int m) {
  const CtrlPoints& q = s.ctrl();
  CostGrad out{0.0, CtrlPoints::Zero(3, q.cols())};
  if (m < 1) throw std::invalid_argument("at least one sample per span is required");
  const double r = env.robotRadius();
  const int segments = s.size() - UniformBSpline::kDegree;
  const size_t n_obs = env.obstacles().size();
  std::vector<Vec3> reach(n_obs);
  for (size_t i = 0; i < n_obs; ++i)
    reach[i] = (env.obstacles()[i].semi_axes.array() + r).matrix() * d_th;

  // Each segment stays inside the hull of its four control points, so
  // obstacles whose center box misses the grown hull contribute nothing.
  std::vector<size_t> relevant;
  int relevant_for = -1;
  const int total = segments * m;
  for (int k = 0; k <= total; ++k) {
    const int j = std::min(k / m, segments - 1);
    if (j != relevant_for) {
      relevant.clear();
      const Box3 hull{q.middleCols(j, 4).rowwise().minCoeff(),
                      q.middleCols(j, 4).rowwise().maxCoeff()};
      const double ta = s.t0() + j * s.knotSpan();
      for (size_t i = 0; i < n_obs; ++i)
        if (env.slabCenterBounds(i, ta, ta + s.knotSpan()).intersects(hull.inflated(reach[i])))
          relevant.push_back(i);
      relevant_for = j;
    }
    if (relevant.empty()) continue;
    const double u = static_cast<double>(k - j * m) / m;
    const double t = s.t0() + static_cast<double>(k) / m * s.knotSpan();
    const auto w = uniformBasis(UniformBSpline::kDegree, u);
    Vec3 p = Vec3::Zero();
    for (int l = 0; l < 4; ++l) p += w[l] * q.col(j + l);
    for (size_t i : relevant) {
      const MovingObstacle& o = env.obstacles()[i];
      const Vec3 axes = (o.semi_axes.array() + r).matrix();
      const Vec3 z = ((p - o.center(t)).array() / axes.array()).matrix();
      const double d = z.norm();
      if (d > d_th) continue;
      out.value += (d - d_th) * (d - d_th);
      if (d <= 0.0) continue;
      const Vec3 gp = (2.0 * (d - d_th) / d) * (z.array() / axes.array()).matrix();
      for (int l = 0; l < 4; ++l) out.grad.col(j + l) += w[l] * gp;
    }
  }
  return out;
}

CostGrad costCorridor(const CtrlPoints& q, const std::vector<int>& indices,
                      const std::vector<Box3>& assigned) {
  if (indices.size() != assigned.size())
    throw std::invalid_argument("costCorridor: one box per index is required");
  CostGrad out{0.0, CtrlPoints::Zero(3, q.cols())};
  for (size_t n = 0; n < indices.size(); ++n) {
    const int i = indices[n];
    const Box3& b = assigned[n];
    for (int k = 0; k < 3; ++k) {
      const double x = q(k, i);
      if (x < b.lo[k]) {
        out.value += b.lo[k] - x;
        out.grad(k, i) -= 1.0;
      } else if (x > b.hi[k]) {
        out.value += x - b.hi[k];
        out.grad(k, i) += 1.0;
      }
    }
  }
  return out;
}

std::vector<int> freeIndices(int n_ctrl) {
  std::vector<int> out;
  for (int i = UniformBSpline::kDegree; i < n_ctrl - UniformBSpline::kDegree; ++i)
    out.push_back(i);
  return out;
}

std::vector<Box3> assignBoxes(const UniformBSpline& s, const Corridor& corridor,
                              const TimedPath& seed_path, double t_s_initial) {
  std::vector<Box3> boxes;
  for (int i : freeIndices(s.size())) {
    const double pt = std::clamp(fitSampleTime(seed_path, t_s_initial, i), seed_path.start(),
                                 seed_path.end());
    boxes.push_back(corridor[associateCuboid(corridor, pt, s.knotTime(i))].box());
  }
  return boxes;
}

CostTerms evaluateCosts(const UniformBSpline& s, const Environment& env, const CostWeights& w,
                        const std::vector<Box3>& boxes, CtrlPoints* grad) {
  const CtrlPoints& q = s.ctrl();
  const auto c = costControl(q, s.knotSpan());
  const auto f = costFeasibility(q, s.knotSpan(), w.bounds);
  const auto od = costDynamicObstacles(s, env, w.d_th, w.samples_per_span);
  const auto ct = costCorridor(q, freeIndices(s.size()), boxes);
  CostTerms t;
  t.control = c.value;
  t.feasibility = f.value;
  t.dynamic = od.value;
  t.corridor = ct.value;
  t.total = w.lambda_c * c.value + w.lambda_f * f.value + w.lambda_od * od.value +
            w.lambda_ct * ct.value;
  if (grad)
    *grad = w.lambda_c * c.grad + w.lambda_f * f.grad + w.lambda_od * od.grad +
            w.lambda_ct * ct.grad;
  return t;
}

double boundExcess(const UniformBSpline& s, const DynamicBounds& b) {
  const auto d = derivativeCtrlPoints(s);
  const double ev = d.V.cwiseAbs().maxCoeff() - b.v_max;
  const double ea = d.A.cwiseAbs().maxCoeff() - b.a_max;
  return std::max({0.0, ev, ea});
}

namespace {

using VecX = Eigen::VectorXd;

struct Problem {
  UniformBSpline spline;
  const Environment& env;
  const CostWeights& w;
  std::vector<Box3> boxes;
  std::vector<int> free;

  VecX pack() const {
    VecX x(3 * free.size());
    for (size_t n = 0; n < free.size(); ++n) x.segment<3>(3 * n) = spline.ctrl().col(free[n]);
    return x;
  }
  void unpack(const VecX& x) {
    CtrlPoints q = spline.ctrl();
    for (size_t n = 0; n < free.size(); ++n) q.col(free[n]) = x.segment<3>(3 * n);
    spline.setCtrl(std::move(q));
  }
  double eval(const VecX& x, VecX& g) {
    unpack(x);
    CtrlPoints full;
    const CostTerms t = evaluateCosts(spline, env, w, boxes, &full);
    g.resize(x.size());
    for (size_t n = 0; n < free.size(); ++n) g.segment<3>(3 * n) = full.col(free[n]);
    return t.total;
  }
};

// Limited-memory BFGS with Armijo backtracking. Returns the iteration count
// and appends the objective after every accepted step to `history`.
int lbfgs(Problem& prob, const SolverParams& params, std::vector<double>& history) {
  VecX x = prob.pack();
  if (x.size() == 0) return 0;
  VecX g;
  double f = prob.eval(x, g);
  history.push_back(f);
  std::deque<std::pair<VecX, VecX>> mem;
  int it = 0;
  for (; it < params.max_iterations; ++it) {
    if (!std::isfinite(f) || g.norm() < params.grad_tol) break;
    // Two-loop recursion.
    VecX d = -g;
    std::vector<double> alpha(mem.size());
    for (size_t k = mem.size(); k-- > 0;) {
      const auto& [s, y] = mem[k];
      alpha[k] = s.dot(d) / y.dot(s);
      d -= alpha[k] * y;
    }
    if (!mem.empty()) {
      const auto& [s, y] = mem.back();
      d *= s.dot(y) / y.squaredNorm();
    } else {
      d /= std::max(1.0, g.norm());
    }
    for (size_t k = 0; k < mem.size(); ++k) {
      const auto& [s, y] = mem[k];
      const double beta = y.dot(d) / y.dot(s);
      d += (alpha[k] - beta) * s;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -g / std::max(1.0, g.norm());
      slope = g.dot(d);
    }

    double step = 1.0;
    VecX xn, gn;
    double fn = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = x + step * d;
      fn = prob.eval(xn, gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    VecX s = xn - x;
    VecX y = gn - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      mem.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(mem.size()) > params.memory) mem.pop_front();
    }
    x = std::move(xn);
    g = std::move(gn);
    const bool stalled = f - fn <= 1e-14 * std::max(1.0, std::abs(f));
    f = fn;
    history.push_back(f);
    if (stalled) {
      ++it;
      break;
    }
  }
  prob.unpack(x);
  return it;
}

}  // namespace

OptimizedTrajectory optimize(const UniformBSpline& initial, const Corridor& corridor,
                             const TimedPath& seed_path, const Environment& env,
                             const CostWeights& w, const SolverParams& params) {
  w.validate();
  if (!(params.bound_shrink > 0.0 && params.bound_shrink <= 1.0))
    throw ConfigError("bound_shrink must be in (0, 1]");
  CostWeights inner = w;
  inner.bounds.v_max *= params.bound_shrink;
  inner.bounds.a_max *= params.bound_shrink;
  const double t_s0 = initial.knotSpan();
  OptimizedTrajectory best;
  best.spline = initial;
  double best_excess = std::numeric_limits<double>::infinity();
  bool have = false;
  int iterations = 0;
  std::vector<std::vector<double>> history;

  UniformBSpline s = initial;
  for (int round = 0; round <= params.max_rounds; ++round) {
    std::vector<Box3> boxes;
    try {
      boxes = assignBoxes(s, corridor, seed_path, t_s0);
    } catch (const QueryError&) {
      if (!have) best.failure = "corridor coverage lost";
      break;
    }
    Problem prob{s, env, inner, std::move(boxes), freeIndices(s.size())};
    history.emplace_back();
    iterations += lbfgs(prob, params, history.back());
    s = prob.spline;
    const CostTerms costs = evaluateCosts(s, env, inner, prob.boxes);
    const double excess = boundExcess(s, w.bounds);
    const bool finite = std::isfinite(costs.total);
    if (finite && excess < best_excess) {
      have = true;
      best_excess = excess;
      best.spline = s;
      best.costs = costs;
      best.rounds = round + 1;
      best.failure.clear();
    }
    if (finite && excess <= params.bound_slack) {
      best.converged = true;
      break;
    }
    s.setKnotSpan(s.knotSpan() * params.gamma);
  }
  if (!best.converged && best.failure.empty()) best.failure = "bounds still violated";
  best.iterations = iterations;
  best.history = std::move(history);
  return best;
}

int selectBest(const std::vector<Candidate>& candidates) {
  int best = -1;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (!c.verified || !c.traj.converged) continue;
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    const auto& b = candidates[best].traj;
    const double jc = c.traj.costs.control;
    if (jc < b.costs.control ||
        (jc == b.costs.control && c.traj.spline.duration() < b.spline.duration()))
      best = static_cast<int>(i);
  }
  return best;
}

}  // namespace sitmp
