#include "sitmp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace sitmp {

using nlohmann::json;

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string toString(TrialOutcome o) {
  switch (o) {
    case TrialOutcome::Success:
      return "success";
    case TrialOutcome::FrontEndFail:
      return "front_end_fail";
    case TrialOutcome::BackEndFail:
      return "back_end_fail";
    case TrialOutcome::OracleFail:
      return "oracle_fail";
  }
  return "unknown";
}

uint64_t envSeedFor(uint64_t base_seed, DensityClass c, int group) {
  return splitmix64(splitmix64(base_seed ^ (0x1000ULL + static_cast<uint64_t>(c))) +
                    static_cast<uint64_t>(group));
}

uint64_t trialSeedFor(uint64_t base_seed, DensityClass c, int index) {
  return splitmix64(splitmix64(base_seed ^ (0x2000ULL + static_cast<uint64_t>(c))) +
                    static_cast<uint64_t>(index));
}

std::vector<uint8_t> largestFreeRegion(const Environment& env) {
  const StaticGrid& grid = env.grid();
  const CellIndex d = grid.dims();
  auto linear = [&](const CellIndex& c) {
    return (static_cast<size_t>(c[2]) * d[1] + c[1]) * d[0] + c[0];
  };
  auto center = [&](const CellIndex& c) {
    const Box3 b = grid.cellBox(c);
    return Vec3(0.5 * (b.lo + b.hi));
  };
  std::vector<uint8_t> clear(grid.cellCount(), 0);
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        const CellIndex c{x, y, z};
        clear[linear(c)] = env.staticClear(center(c)) ? 1 : 0;
      }
  // label components; 0 = blocked or unvisited
  std::vector<int> label(grid.cellCount(), 0);
  int best = 0;
  size_t best_size = 0;
  int next = 0;
  std::vector<CellIndex> stack;
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        const CellIndex c{x, y, z};
        if (!clear[linear(c)] || label[linear(c)]) continue;
        ++next;
        size_t size = 0;
        label[linear(c)] = next;
        stack.push_back(c);
        while (!stack.empty()) {
          const CellIndex u = stack.back();
          stack.pop_back();
          ++size;
          for (int k = 0; k < 3; ++k)
            for (int step : {-1, 1}) {
              CellIndex w = u;
              w[k] += step;
              if (!grid.inBounds(w) || !clear[linear(w)] || label[linear(w)]) continue;
              label[linear(w)] = next;
              stack.push_back(w);
            }
        }
        if (size > best_size) {
          best_size = size;
          best = next;
        }
      }
  std::vector<uint8_t> mask(grid.cellCount(), 0);
  for (size_t i = 0; i < mask.size(); ++i) mask[i] = best != 0 && label[i] == best;
  return mask;
}

std::pair<Vec3, Vec3> sampleQuery(const Environment& env, uint64_t seed, double min_separation) {
  const std::vector<uint8_t> region_mask = largestFreeRegion(env);
  const StaticGrid& grid = env.grid();
  auto reachable = [&](const Vec3& p) {
    const CellIndex c = grid.cellOf(p);
    if (!grid.inBounds(c)) return false;
    const CellIndex d = grid.dims();
    if (!region_mask[(static_cast<size_t>(c[2]) * d[1] + c[1]) * d[0] + c[0]]) return false;
    const Box3 b = grid.cellBox(c);
    return edgeStaticFree(env, p, Vec3(0.5 * (b.lo + b.hi)));
  };
  std::mt19937_64 rng(seed);
  const Box3 region = samplingBounds(env);
  auto draw = [&]() {
    Vec3 p;
    for (int k = 0; k < 3; ++k)
      p[k] = std::uniform_real_distribution<double>(region.lo[k], region.hi[k])(rng);
    return p;
  };
  auto usable = [&](const Vec3& p) {
    return env.staticClear(p) && boxCollisionIntervals(env, Box3{p, p}, env.horizon()).empty();
  };
  for (int attempt = 0; attempt < 20000; ++attempt) {
    const Vec3 s = draw();
    const Vec3 g = draw();
    if ((g - s).norm() < min_separation) continue;
    if (usable(s) && usable(g) && reachable(s) && reachable(g)) return {s, g};
  }
  throw InputError("could not sample a collision-free start/goal pair");
}

std::optional<Violation> oracleCheck(const UniformBSpline& s, const Environment& env,
                                     const DynamicBounds& bounds, double dt, double slack) {
  constexpr double h = 1e-5;
  const long steps = static_cast<long>(std::floor(s.duration() / dt));
  for (long k = 0; k <= steps + 1; ++k) {
    const double t = k <= steps ? s.t0() + k * dt : s.tEnd();
    const Vec3 p = s.evaluate(t);
    if (env.grid().blockedWithin(p, env.robotRadius()))
      return Violation{t, ViolationKind::Static};
    if (!isPointFree(env, p, t)) return Violation{t, ViolationKind::Dynamic};
    const double tc = std::clamp(t, s.t0() + h, s.tEnd() - h);
    const Vec3 pm = s.evaluate(tc - h);
    const Vec3 p0 = s.evaluate(tc);
    const Vec3 pp = s.evaluate(tc + h);
    const Vec3 v = (pp - pm) / (2.0 * h);
    const Vec3 a = (pp - 2.0 * p0 + pm) / (h * h);
    if (v.cwiseAbs().maxCoeff() > bounds.v_max + slack)
      return Violation{t, ViolationKind::Velocity};
    if (a.cwiseAbs().maxCoeff() > bounds.a_max + slack)
      return Violation{t, ViolationKind::Acceleration};
  }
  return std::nullopt;
}

TrialRecord runTrial(const Environment& env, const BenchParams& p, int index, uint64_t env_seed) {
  TrialRecord rec;
  rec.index = index;
  rec.seed = trialSeedFor(p.base_seed, p.density, index);
  rec.env_seed = env_seed;
  rec.density = p.density;
  try {
    std::tie(rec.start, rec.goal) = sampleQuery(env, rec.seed, p.min_separation);
  } catch (const InputError& e) {
    rec.outcome = TrialOutcome::FrontEndFail;
    rec.note = e.what();
    return rec;
  }
  PlanRequest req = p.request;
  req.start = rec.start;
  req.goal = rec.goal;
  req.graph.seed = rec.seed;
  const PlanResult res = plan(env, req);
  rec.front_end_ms = res.timings.front_end_ms;
  rec.total_ms = res.timings.total_ms;
  rec.candidates = static_cast<int>(res.candidates.size());
  switch (res.status) {
    case PlanStatus::FrontEndFail:
      rec.outcome = TrialOutcome::FrontEndFail;
      rec.note = res.message;
      return rec;
    case PlanStatus::BackEndFail:
      rec.outcome = TrialOutcome::BackEndFail;
      rec.note = res.message;
      return rec;
    case PlanStatus::Success:
      break;
  }
  rec.path_length = res.metrics.path_length;
  rec.flight_time = res.metrics.flight_time;
  rec.control_cost = res.metrics.control_cost;
  rec.initial_control_cost = res.metrics.initial_control_cost;
  const auto& spline = res.candidates[res.best].traj.spline;
  rec.trajectory = spline;
  if (auto v = oracleCheck(spline, env, req.bounds)) {
    rec.outcome = TrialOutcome::OracleFail;
    std::ostringstream os;
    os << toString(v->kind) << " at t=" << v->t;
    rec.note = os.str();
  } else {
    rec.outcome = TrialOutcome::Success;
  }
  return rec;
}

BatchResult runBatch(const BenchParams& p, bool with_timings) {
  if (p.n_trials < 1) throw ConfigError("n_trials must be >= 1");
  if (p.trials_per_env < 1) throw ConfigError("trials_per_env must be >= 1");
  const int groups = (p.n_trials + p.trials_per_env - 1) / p.trials_per_env;
  int threads = p.threads > 0 ? p.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, groups);

  EnvGenParams gen = p.env;
  gen.density = p.density;
  std::vector<TrialRecord> records(p.n_trials);
  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr error;
  auto worker = [&]() {
    for (int g = next++; g < groups; g = next++) {
      try {
        const uint64_t env_seed = envSeedFor(p.base_seed, p.density, g);
        const Environment env = generateRandomEnv(gen, env_seed);
        const int end = std::min(p.n_trials, (g + 1) * p.trials_per_env);
        for (int i = g * p.trials_per_env; i < end; ++i) records[i] = runTrial(env, p, i, env_seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);

  BatchResult out;
  out.records = std::move(records);
  out.summary = summarize(out.records, with_timings);
  out.summary["class"] = toString(p.density);
  out.summary["base_seed"] = p.base_seed;
  return out;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

json stats(std::vector<double> v) {
  if (v.empty()) return {{"mean", nullptr}, {"median", nullptr}};
  double sum = 0.0;
  for (double x : v) sum += x;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  const double median = n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  return {{"mean", sum / n}, {"median", median}};
}

}  // namespace

std::string recordsToCsv(const std::vector<TrialRecord>& records, bool with_timings) {
  std::ostringstream os;
  os << "index,seed,env_seed,class,outcome,start_x,start_y,start_z,goal_x,goal_y,goal_z";
  if (with_timings) os << ",front_end_ms,total_ms";
  os << ",path_length,flight_time,control_cost,initial_control_cost,candidates\n";
  for (const auto& r : records) {
    os << r.index << ',' << r.seed << ',' << r.env_seed << ',' << toString(r.density) << ','
       << toString(r.outcome);
    for (int k = 0; k < 3; ++k) os << ',' << fmt(r.start[k]);
    for (int k = 0; k < 3; ++k) os << ',' << fmt(r.goal[k]);
    if (with_timings) os << ',' << fmt(r.front_end_ms) << ',' << fmt(r.total_ms);
    os << ',' << fmt(r.path_length) << ',' << fmt(r.flight_time) << ',' << fmt(r.control_cost)
       << ',' << fmt(r.initial_control_cost) << ',' << r.candidates << '\n';
  }
  return os.str();
}

json summarize(const std::vector<TrialRecord>& records, bool with_timings) {
  json j;
  int counts[4] = {0, 0, 0, 0};
  std::vector<double> len, flight, cc, icc, fe, total;
  for (const auto& r : records) {
    ++counts[static_cast<int>(r.outcome)];
    if (with_timings) {
      fe.push_back(r.front_end_ms);
      total.push_back(r.total_ms);
    }
    if (r.outcome != TrialOutcome::Success) continue;
    len.push_back(r.path_length);
    flight.push_back(r.flight_time);
    cc.push_back(r.control_cost);
    icc.push_back(r.initial_control_cost);
  }
  const size_t n = records.size();
  j["n_trials"] = n;
  j["success"] = counts[0];
  j["front_end_fail"] = counts[1];
  j["back_end_fail"] = counts[2];
  j["oracle_fail"] = counts[3];
  j["success_rate"] = n ? static_cast<double>(counts[0]) / n : 0.0;
  j["path_length"] = stats(len);
  j["flight_time"] = stats(flight);
  j["control_cost"] = stats(cc);
  j["initial_control_cost"] = stats(icc);
  if (!cc.empty()) {
    const json a = stats(cc);
    const json b = stats(icc);
    j["smoothing_ratio"] =
        b["mean"].get<double>() > 0.0 ? a["mean"].get<double>() / b["mean"].get<double>() : 0.0;
  }
  if (with_timings) {
    j["front_end_ms"] = stats(fe);
    j["total_ms"] = stats(total);
  }
  return j;
}

}  // namespace sitmp
