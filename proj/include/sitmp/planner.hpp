#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sitmp/bspline.hpp"
#include "sitmp/corridor.hpp"
#include "sitmp/optimizer.hpp"
#include "sitmp/roadmap.hpp"
#include "sitmp/scenario_io.hpp"

namespace sitmp {

enum class ViolationKind { Static, Dynamic, Velocity, Acceleration };
std::string toString(ViolationKind k);

struct Violation {
  double t = 0.0;
  ViolationKind kind = ViolationKind::Static;
};

/// Dense sweep at step dt (plus the final instant): static clearance of the
/// robot ball, inflated-ellipsoid clearance (d > 1) and per-axis v/a limits
/// with `slack`. Returns the earliest violation. Throws std::invalid_argument
/// for dt <= 0.
std::optional<Violation> checkTrajectory(const UniformBSpline& s, const Environment& env,
                                         const DynamicBounds& bounds, double dt = 0.01,
                                         double slack = 1e-2);

struct PlanRequest {
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  DynamicBounds bounds;
  CostWeights weights;
  GraphBudget graph;
  int k_max = 8;
  int vertex_cap = 12;
  /// Extra sampling rounds of graph.n_samples each when no path is usable;
  /// after the last one, extraction is retried once at twice vertex_cap.
  int regrow_rounds = 3;
  double t_s = 0.25;
  CorridorParams corridor;
  SolverParams solver;
  double check_dt = 0.01;
};

enum class PlanStatus { Success, FrontEndFail, BackEndFail };
std::string toString(PlanStatus s);

struct PlanCandidate {
  TimedPath path;
  Corridor corridor;
  std::optional<UniformBSpline> initial;
  OptimizedTrajectory traj;
  bool verified = false;
  std::optional<Violation> violation;
  std::string error;  // corridor / fitting failure, if any
  double corridor_ms = 0.0;
  double optimize_ms = 0.0;
  double check_ms = 0.0;
};

struct PlanTimings {
  double front_end_ms = 0.0;
  double back_end_ms = 0.0;
  double total_ms = 0.0;
};

struct PlanMetrics {
  double path_length = 0.0;
  double flight_time = 0.0;
  double control_cost = 0.0;          // integral of squared jerk
  double initial_control_cost = 0.0;  // same for the fitted initial spline
};

struct PlanResult {
  PlanStatus status = PlanStatus::FrontEndFail;
  std::string message;
  RoadmapGraph graph;
  GraphStats graph_stats;
  std::vector<PlanCandidate> candidates;
  int best = -1;
  PlanMetrics metrics;
  PlanTimings timings;
};

/// Full pipeline. Invalid requests (start == goal, endpoint statically
/// blocked) come back as FrontEndFail rather than exceptions.
PlanResult plan(const Environment& env, const PlanRequest& req);

/// Arc length by sampling at dt.
double splineLength(const UniformBSpline& s, double dt = 0.01);

inline constexpr const char* kLogSchema = "sitmp-log/1";

nlohmann::json requestToJson(const PlanRequest& req);
PlanRequest requestFromJson(const nlohmann::json& j, PlanRequest defaults = {});
nlohmann::json splineToJson(const UniformBSpline& s);
UniformBSpline splineFromJson(const nlohmann::json& j);

/// "sitmp-log/1" document. Timings are left out when `with_timings` is false
/// so that repeated runs produce identical bytes.
nlohmann::json planLog(const Environment& env, const PlanRequest& req, const PlanResult& res,
                       bool with_timings);

}  // namespace sitmp
