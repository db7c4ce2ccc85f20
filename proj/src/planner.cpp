#include "sitmp/planner.hpp"

#include <chrono>
#include <cmath>

#include "sitmp/utvd.hpp"

namespace sitmp {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double msSince(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

std::string toString(ViolationKind k) {
  switch (k) {
    case ViolationKind::Static:
      return "static";
    case ViolationKind::Dynamic:
      return "dynamic";
    case ViolationKind::Velocity:
      return "velocity";
    case ViolationKind::Acceleration:
      return "acceleration";
  }
  return "unknown";
}

std::string toString(PlanStatus s) {
  switch (s) {
    case PlanStatus::Success:
      return "success";
    case PlanStatus::FrontEndFail:
      return "front_end_fail";
    case PlanStatus::BackEndFail:
      return "back_end_fail";
  }
  return "unknown";
}

std::optional<Violation> checkTrajectory(const UniformBSpline& s, const Environment& env,
                                         const DynamicBounds& bounds, double dt, double slack) {
  if (!(dt > 0.0)) throw std::invalid_argument("checkTrajectory: dt must be positive");
  const double r = env.robotRadius();
  const Vec3 qlo = s.ctrl().rowwise().minCoeff();
  const Vec3 qhi = s.ctrl().rowwise().maxCoeff();
  std::vector<size_t> relevant;
  for (size_t i = 0; i < env.obstacles().size(); ++i) {
    const Vec3 m = (env.obstacles()[i].semi_axes.array() + r).matrix();
    if (env.centerBounds(i, s.t0(), s.tEnd()).intersects(Box3{qlo, qhi}.inflated(m)))
      relevant.push_back(i);
  }
  const long steps = static_cast<long>(std::floor(s.duration() / dt));
  for (long k = 0; k <= steps + 1; ++k) {
    const double t = k <= steps ? s.t0() + k * dt : s.tEnd();
    const Vec3 p = s.evaluate(t, 0);
    if (!env.staticClear(p)) return Violation{t, ViolationKind::Static};
    for (size_t i : relevant) {
      const MovingObstacle& o = env.obstacles()[i];
      const Vec3 z = ((p - o.center(t)).array() / (o.semi_axes.array() + r)).matrix();
      if (z.norm() <= 1.0) return Violation{t, ViolationKind::Dynamic};
    }
    if (s.evaluate(t, 1).cwiseAbs().maxCoeff() > bounds.v_max + slack)
      return Violation{t, ViolationKind::Velocity};
    if (s.evaluate(t, 2).cwiseAbs().maxCoeff() > bounds.a_max + slack)
      return Violation{t, ViolationKind::Acceleration};
  }
  return std::nullopt;
}

double splineLength(const UniformBSpline& s, double dt) {
  double len = 0.0;
  Vec3 prev = s.evaluate(s.t0());
  const long steps = static_cast<long>(std::ceil(s.duration() / dt));
  for (long k = 1; k <= steps; ++k) {
    const Vec3 p = s.evaluate(std::min(s.tEnd(), s.t0() + k * dt));
    len += (p - prev).norm();
    prev = p;
  }
  return len;
}

PlanResult plan(const Environment& env, const PlanRequest& req) {
  const auto t_begin = Clock::now();
  PlanResult res;
  auto fail = [&](PlanStatus st, std::string msg) {
    res.status = st;
    res.message = std::move(msg);
    res.timings.total_ms = msSince(t_begin);
    return res;
  };

  req.bounds.validate();
  CostWeights weights = req.weights;
  weights.bounds = req.bounds;
  weights.validate();
  if ((req.goal - req.start).norm() < 1e-9) return fail(PlanStatus::FrontEndFail, "start equals goal");
  if (!env.staticClear(req.start)) return fail(PlanStatus::FrontEndFail, "start is blocked");
  if (!env.staticClear(req.goal)) return fail(PlanStatus::FrontEndFail, "goal is blocked");

  res.graph = buildGraph(env, req.start, req.goal, req.bounds, req.graph, &res.graph_stats);
  std::mt19937_64 grow_rng(req.graph.seed ^ 0x9e3779b97f4a7c15ULL);
  const double t_start = env.horizon().lo;

  std::vector<TimedPath> timed;
  auto collect = [&](int vertex_cap) {
    for (auto& tp : extractTimedPaths(res.graph, RoadmapGraph::kStart, RoadmapGraph::kGoal,
                                      req.bounds, t_start, req.k_max, vertex_cap)) {
      bool distinct = true;
      for (const auto& kept : timed)
        if (checkEquiv(tp, kept, env, req.graph.equiv_samples)) {
          distinct = false;
          break;
        }
      if (distinct) timed.push_back(std::move(tp));
    }
  };
  for (int round = 0; round <= req.regrow_rounds; ++round) {
    collect(req.vertex_cap);
    if (!timed.empty() || round == req.regrow_rounds) break;
    growGraph(res.graph, env, req.bounds, req.graph, grow_rng, &res.graph_stats);
  }
  // last resort: longer vertex paths through the grown graph
  if (timed.empty()) collect(2 * req.vertex_cap);
  res.timings.front_end_ms = msSince(t_begin);
  if (timed.empty()) return fail(PlanStatus::FrontEndFail, "no time-feasible path in the graph");

  const auto t_back = Clock::now();
  for (auto& tp : timed) {
    PlanCandidate cand;
    cand.path = std::move(tp);
    auto t0 = Clock::now();
    try {
      cand.corridor = inflateCorridor(cand.path, env, req.corridor);
    } catch (const CorridorError& e) {
      cand.error = e.what();
      cand.corridor_ms = msSince(t0);
      res.candidates.push_back(std::move(cand));
      continue;
    }
    cand.corridor_ms = msSince(t0);
    t0 = Clock::now();
    const double t_s = std::min(req.t_s, cand.path.duration() / 4.0);
    cand.initial = fitInitial(cand.path, t_s);
    cand.traj = optimize(*cand.initial, cand.corridor, cand.path, env, weights, req.solver);
    cand.optimize_ms = msSince(t0);
    t0 = Clock::now();
    cand.violation = checkTrajectory(cand.traj.spline, env, req.bounds, req.check_dt);
    cand.verified = cand.traj.converged && !cand.violation;
    cand.check_ms = msSince(t0);
    res.candidates.push_back(std::move(cand));
  }

  std::vector<Candidate> pool;
  for (const auto& c : res.candidates) pool.push_back({c.traj, c.verified});
  res.best = selectBest(pool);
  res.timings.back_end_ms = msSince(t_back);
  if (res.best < 0) return fail(PlanStatus::BackEndFail, "no candidate passed optimization and checks");

  const PlanCandidate& b = res.candidates[res.best];
  res.metrics.path_length = splineLength(b.traj.spline);
  res.metrics.flight_time = b.traj.spline.duration();
  res.metrics.control_cost = controlCostIntegral(b.traj.spline);
  res.metrics.initial_control_cost = controlCostIntegral(*b.initial);
  res.status = PlanStatus::Success;
  res.timings.total_ms = msSince(t_begin);
  return res;
}

json splineToJson(const UniformBSpline& s) {
  json ctrl = json::array();
  for (int i = 0; i < s.size(); ++i) ctrl.push_back(vecToJson(s.ctrl().col(i)));
  return {{"degree", UniformBSpline::kDegree}, {"t0", s.t0()}, {"t_s", s.knotSpan()},
          {"ctrl", ctrl}};
}

UniformBSpline splineFromJson(const json& j) {
  try {
    if (j.at("degree").get<int>() != UniformBSpline::kDegree)
      throw ParseError("only cubic splines are supported");
    const auto& c = j.at("ctrl");
    CtrlPoints q(3, static_cast<Eigen::Index>(c.size()));
    for (size_t i = 0; i < c.size(); ++i) q.col(static_cast<Eigen::Index>(i)) = vecFromJson(c[i]);
    return UniformBSpline(std::move(q), j.at("t_s").get<double>(), j.at("t0").get<double>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad spline: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("bad spline: ") + e.what());
  }
}

json requestToJson(const PlanRequest& r) {
  const CostWeights& w = r.weights;
  return {
      {"start", vecToJson(r.start)},
      {"goal", vecToJson(r.goal)},
      {"bounds", {{"v_max", r.bounds.v_max}, {"a_max", r.bounds.a_max}}},
      {"weights",
       {{"lambda_c", w.lambda_c},
        {"lambda_od", w.lambda_od},
        {"lambda_ct", w.lambda_ct},
        {"lambda_f", w.lambda_f},
        {"d_th", w.d_th},
        {"samples_per_span", w.samples_per_span}}},
      {"graph",
       {{"n_samples", r.graph.n_samples},
        {"wall_ms", r.graph.wall_ms},
        {"seed", r.graph.seed},
        {"p_uniform", r.graph.p_uniform},
        {"equiv_samples", r.graph.equiv_samples}}},
      {"k_max", r.k_max},
      {"vertex_cap", r.vertex_cap},
      {"regrow_rounds", r.regrow_rounds},
      {"t_s", r.t_s},
      {"corridor",
       {{"seed_spacing", r.corridor.seed_spacing},
        {"step", r.corridor.step},
        {"max_extent", r.corridor.max_extent}}},
      {"solver",
       {{"max_iterations", r.solver.max_iterations},
        {"grad_tol", r.solver.grad_tol},
        {"memory", r.solver.memory},
        {"gamma", r.solver.gamma},
        {"max_rounds", r.solver.max_rounds},
        {"bound_slack", r.solver.bound_slack},
        {"bound_shrink", r.solver.bound_shrink}}},
      {"check_dt", r.check_dt},
  };
}

namespace {

template <typename T>
void readOpt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

PlanRequest requestFromJson(const json& j, PlanRequest r) {
  try {
    if (!j.is_object()) throw ParseError("planner settings must be an object");
    if (j.contains("start")) r.start = vecFromJson(j.at("start"));
    if (j.contains("goal")) r.goal = vecFromJson(j.at("goal"));
    if (j.contains("bounds")) {
      readOpt(j["bounds"], "v_max", r.bounds.v_max);
      readOpt(j["bounds"], "a_max", r.bounds.a_max);
    }
    if (j.contains("weights")) {
      const json& w = j["weights"];
      readOpt(w, "lambda_c", r.weights.lambda_c);
      readOpt(w, "lambda_od", r.weights.lambda_od);
      readOpt(w, "lambda_ct", r.weights.lambda_ct);
      readOpt(w, "lambda_f", r.weights.lambda_f);
      readOpt(w, "d_th", r.weights.d_th);
      readOpt(w, "samples_per_span", r.weights.samples_per_span);
    }
    if (j.contains("graph")) {
      const json& g = j["graph"];
      readOpt(g, "n_samples", r.graph.n_samples);
      readOpt(g, "wall_ms", r.graph.wall_ms);
      readOpt(g, "seed", r.graph.seed);
      readOpt(g, "p_uniform", r.graph.p_uniform);
      readOpt(g, "equiv_samples", r.graph.equiv_samples);
    }
    readOpt(j, "k_max", r.k_max);
    readOpt(j, "vertex_cap", r.vertex_cap);
    readOpt(j, "regrow_rounds", r.regrow_rounds);
    readOpt(j, "t_s", r.t_s);
    if (j.contains("corridor")) {
      const json& c = j["corridor"];
      readOpt(c, "seed_spacing", r.corridor.seed_spacing);
      readOpt(c, "step", r.corridor.step);
      readOpt(c, "max_extent", r.corridor.max_extent);
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      readOpt(s, "max_iterations", r.solver.max_iterations);
      readOpt(s, "grad_tol", r.solver.grad_tol);
      readOpt(s, "memory", r.solver.memory);
      readOpt(s, "gamma", r.solver.gamma);
      readOpt(s, "max_rounds", r.solver.max_rounds);
      readOpt(s, "bound_slack", r.solver.bound_slack);
      readOpt(s, "bound_shrink", r.solver.bound_shrink);
    }
    readOpt(j, "check_dt", r.check_dt);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad planner settings: ") + e.what());
  }
  r.weights.bounds = r.bounds;
  return r;
}

namespace {

json intervalToJson(const TimeInterval& iv) { return json::array({iv.lo, iv.hi}); }

json timedPathToJson(const TimedPath& tp) {
  json v = json::array();
  for (const auto& p : tp.vertices) v.push_back(vecToJson(p));
  json chosen = json::array();
  for (const auto& iv : tp.chosen) chosen.push_back(intervalToJson(iv));
  return {{"vertices", v}, {"arrive", tp.arrive}, {"depart", tp.depart}, {"chosen", chosen}};
}

json costsToJson(const CostTerms& c) {
  return {{"control", c.control},
          {"feasibility", c.feasibility},
          {"dynamic", c.dynamic},
          {"corridor", c.corridor},
          {"total", c.total}};
}

}  // namespace

json planLog(const Environment& env, const PlanRequest& req, const PlanResult& res,
             bool with_timings) {
  Scenario sc;
  sc.env = env;
  sc.start = req.start;
  sc.goal = req.goal;
  json settings = requestToJson(req);
  settings.erase("start");
  settings.erase("goal");
  sc.planner = settings;

  json log;
  log["schema"] = kLogSchema;
  log["scenario"] = scenarioToJson(sc);
  log["request"] = requestToJson(req);
  const GraphStats& st = res.graph_stats;
  log["graph"] = {
      {"summary",
       {{"vertices", res.graph.vertices().size()},
        {"guards", res.graph.guards().size()},
        {"connectors", res.graph.connectorCount()},
        {"edges", res.graph.edges().size()},
        {"samples", st.samples},
        {"rejected_static", st.rejected_static},
        {"new_guards", st.new_guards},
        {"new_connectors", st.new_connectors},
        {"replaced", st.replaced},
        {"discarded_overlap", st.discarded_overlap},
        {"discarded_visibility", st.discarded_visibility},
        {"discarded_equivalent", st.discarded_equivalent}}},
      {"dump", graphToJson(res.graph)}};

  json cands = json::array();
  for (const auto& c : res.candidates) {
    json cj;
    cj["timed_path"] = timedPathToJson(c.path);
    json cor = json::array();
    for (const auto& cb : c.corridor)
      cor.push_back({{"b_lo", vecToJson(cb.b_lo)},
                     {"b_hi", vecToJson(cb.b_hi)},
                     {"window", intervalToJson(cb.window)},
                     {"anchor", intervalToJson(cb.anchor)}});
    cj["corridor"] = cor;
    if (!c.error.empty()) {
      cj["error"] = c.error;
    } else {
      cj["initial_spline"] = splineToJson(*c.initial);
      cj["spline"] = splineToJson(c.traj.spline);
      cj["costs"] = costsToJson(c.traj.costs);
      cj["converged"] = c.traj.converged;
      cj["iterations"] = c.traj.iterations;
      cj["rounds"] = c.traj.rounds;
      if (!c.traj.failure.empty()) cj["failure"] = c.traj.failure;
      cj["verified"] = c.verified;
      cj["violation"] = c.violation ? json{{"t", c.violation->t}, {"kind", toString(c.violation->kind)}}
                                    : json(nullptr);
    }
    if (with_timings)
      cj["timings_ms"] = {
          {"corridor", c.corridor_ms}, {"optimize", c.optimize_ms}, {"check", c.check_ms}};
    cands.push_back(std::move(cj));
  }
  log["candidates"] = cands;
  log["best"] = res.best >= 0 ? json(res.best) : json(nullptr);
  log["status"] = toString(res.status);
  if (!res.message.empty()) log["message"] = res.message;
  if (res.status == PlanStatus::Success)
    log["metrics"] = {{"path_length", res.metrics.path_length},
                      {"flight_time", res.metrics.flight_time},
                      {"control_cost", res.metrics.control_cost},
                      {"initial_control_cost", res.metrics.initial_control_cost}};
  if (with_timings)
    log["timings_ms"] = {{"front_end", res.timings.front_end_ms},
                         {"back_end", res.timings.back_end_ms},
                         {"total", res.timings.total_ms}};
  return log;
}

}  // namespace sitmp
