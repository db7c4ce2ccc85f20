#pragma once

#include <string>
#include <vector>

#include "sitmp/bspline.hpp"
#include "sitmp/corridor.hpp"
#include "sitmp/environment.hpp"
#include "sitmp/kinematics.hpp"

namespace sitmp {

struct CostWeights {
  double lambda_c = 1.0;
  double lambda_od = 1e3;
  double lambda_ct = 1e3;
  double lambda_f = 1e4;
  double d_th = 1.5;  // in normalized ellipsoid distance
  DynamicBounds bounds;
  int samples_per_span = 4;

  void validate() const;
};

/// Value plus gradient with respect to every control point.
struct CostGrad {
  double value = 0.0;
  CtrlPoints grad;
};

/// Sum of squared jerk control points.
CostGrad costControl(const CtrlPoints& q, double t_s);

/// Per-dimension squared excess of |V| over v_max and |A| over a_max.
CostGrad costFeasibility(const CtrlPoints& q, double t_s, const DynamicBounds& bounds);

/// (d - d_th)^2 for every sample with d <= d_th, where d is the distance to
/// an obstacle in the metric of its semi-axes grown by the robot radius.
/// Samples are taken `m` per knot span plus the final endpoint.
CostGrad costDynamicObstacles(const UniformBSpline& s, const Environment& env, double d_th,
                              int m);

/// L1 distance of each listed control point outside its assigned box.
/// `assigned[k]` is the box for control point `indices[k]`.
CostGrad costCorridor(const CtrlPoints& q, const std::vector<int>& indices,
                      const std::vector<Box3>& assigned);

struct CostTerms {
  double control = 0.0;
  double feasibility = 0.0;
  double dynamic = 0.0;
  double corridor = 0.0;
  double total = 0.0;
};

struct SolverParams {
  int max_iterations = 200;
  double grad_tol = 1e-6;
  int memory = 8;
  double gamma = 1.1;  // knot-span growth per refinement round
  int max_rounds = 5;
  double bound_slack = 5e-3;  // allowed per-axis excess on V and A control points
  /// The penalty targets bounds scaled by this factor so that the hinge's
  /// residual lands inside the true bounds.
  double bound_shrink = 0.97;
};

struct OptimizedTrajectory {
  UniformBSpline spline;
  CostTerms costs;
  bool converged = false;
  int iterations = 0;  // summed over rounds
  int rounds = 0;
  /// Objective after each accepted iteration, per round.
  std::vector<std::vector<double>> history;
  std::string failure;
};

/// Control points whose corridor term is active: all but the first and last
/// kDegree, which stay frozen.
std::vector<int> freeIndices(int n_ctrl);

/// Boxes for the free control points of `s`, associating each with the
/// cuboid of its seed-path time (see associateCuboid). Throws QueryError on
/// coverage loss.
std::vector<Box3> assignBoxes(const UniformBSpline& s, const Corridor& corridor,
                              const TimedPath& seed_path, double t_s_initial);

/// Weighted objective and its individual terms.
CostTerms evaluateCosts(const UniformBSpline& s, const Environment& env, const CostWeights& w,
                        const std::vector<Box3>& boxes, CtrlPoints* grad = nullptr);

/// Quasi-Newton descent on the free control points with the knot span fixed,
/// then knot-span growth by gamma while the bounds are violated.
OptimizedTrajectory optimize(const UniformBSpline& initial, const Corridor& corridor,
                             const TimedPath& seed_path, const Environment& env,
                             const CostWeights& w, const SolverParams& params = {});

/// Largest per-axis excess of the V and A control points over the bounds.
double boundExcess(const UniformBSpline& s, const DynamicBounds& b);

struct Candidate {
  OptimizedTrajectory traj;
  bool verified = false;
};

/// Index of the verified, converged candidate with least control cost (ties:
/// shorter flight time, then lower index); -1 if none qualifies.
int selectBest(const std::vector<Candidate>& candidates);

}  // namespace sitmp
