// Command-line front end: plan, bench, verify, gen.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sitmp/bench.hpp"
#include "sitmp/planner.hpp"
#include "sitmp/scenario_io.hpp"

using namespace sitmp;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kOracleFail = 1;
constexpr int kError = 2;

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    writeTextFile(path, text);
}

int runPlan(const std::string& scenario_path, const std::string& out, std::optional<uint64_t> seed,
            bool deterministic) {
  const Scenario sc = loadScenarioFile(scenario_path);
  if (!sc.start || !sc.goal) throw InputError("scenario has no query (start/goal)");
  PlanRequest req = requestFromJson(sc.planner);
  req.start = *sc.start;
  req.goal = *sc.goal;
  if (seed) req.graph.seed = *seed;
  if (deterministic) req.graph.wall_ms = 0.0;
  const PlanResult res = plan(sc.env, req);
  emit(out, planLog(sc.env, req, res, !deterministic).dump(1) + "\n");

  std::cerr << "status: " << toString(res.status);
  if (!res.message.empty()) std::cerr << " (" << res.message << ")";
  std::cerr << "\n";
  if (res.status != PlanStatus::Success) return kOk;
  const auto& best = res.candidates[res.best].traj.spline;
  if (auto v = oracleCheck(best, sc.env, req.bounds)) {
    std::cerr << "oracle_fail: " << toString(v->kind) << " at t=" << v->t << "\n";
    return kOracleFail;
  }
  std::cerr << "length " << res.metrics.path_length << " m, flight " << res.metrics.flight_time
            << " s, control cost " << res.metrics.control_cost << "\n";
  return kOk;
}

int runBench(const std::string& cls, int trials, uint64_t seed, const std::string& out,
             int threads, bool deterministic) {
  std::vector<DensityClass> classes;
  if (cls == "all")
    classes = {DensityClass::Sparse, DensityClass::Moderate, DensityClass::Dense};
  else
    classes = {parseDensityClass(cls)};

  std::vector<TrialRecord> all;
  json summary;
  summary["classes"] = json::array();
  for (DensityClass c : classes) {
    BenchParams p;
    p.density = c;
    p.n_trials = trials;
    p.base_seed = seed;
    p.threads = threads;
    const auto t0 = std::chrono::steady_clock::now();
    BatchResult r = runBatch(p, !deterministic);
    const double sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!deterministic) r.summary["wall_s"] = sec;
    std::cerr << toString(c) << ": success " << r.summary["success"] << "/" << trials
              << ", oracle_fail " << r.summary["oracle_fail"] << "\n";
    summary["classes"].push_back(r.summary);
    all.insert(all.end(), r.records.begin(), r.records.end());
  }
  summary["overall"] = summarize(all, !deterministic);
  if (out.empty() || out == "-") {
    std::cout << recordsToCsv(all, !deterministic) << summary.dump(1) << "\n";
  } else {
    writeTextFile(out + ".csv", recordsToCsv(all, !deterministic));
    writeTextFile(out + ".summary.json", summary.dump(1) + "\n");
  }
  return summary["overall"]["oracle_fail"].get<int>() == 0 ? kOk : kOracleFail;
}

int runVerify(const std::string& log_path) {
  json log;
  try {
    log = json::parse(readTextFile(log_path));
  } catch (const json::exception& e) {
    throw ParseError(std::string("log is not valid JSON: ") + e.what());
  }
  if (log.value("schema", "") != kLogSchema) throw ParseError("not a sitmp-log/1 document");
  const Scenario sc = scenarioFromJson(log.at("scenario"));
  const PlanRequest req = requestFromJson(log.at("request"));
  const std::string status = log.at("status").get<std::string>();
  int bad = 0;
  const auto& cands = log.at("candidates");
  for (size_t i = 0; i < cands.size(); ++i) {
    if (!cands[i].value("verified", false)) continue;
    const UniformBSpline s = splineFromJson(cands[i].at("spline"));
    if (auto v = oracleCheck(s, sc.env, req.bounds)) {
      std::cout << "candidate " << i << ": oracle_fail " << toString(v->kind) << " at t=" << v->t
                << "\n";
      ++bad;
    } else {
      std::cout << "candidate " << i << ": clean\n";
    }
  }
  if (status == "success" && log.at("best").is_null()) {
    std::cout << "log claims success without a best candidate\n";
    ++bad;
  }
  std::cout << "status " << status << ", " << (bad ? "oracle_fail" : "verified") << "\n";
  return bad ? kOracleFail : kOk;
}

int runGen(const std::string& cls, uint64_t seed, const std::string& out, double min_sep) {
  EnvGenParams gp;
  gp.density = parseDensityClass(cls);
  Scenario sc;
  sc.env = generateRandomEnv(gp, seed);
  const auto [s, g] = sampleQuery(sc.env, splitmix64(seed), min_sep);
  sc.start = s;
  sc.goal = g;
  PlanRequest req;
  req.graph.seed = seed;
  json settings = requestToJson(req);
  settings.erase("start");
  settings.erase("goal");
  sc.planner = settings;
  emit(out, writeScenario(sc));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Safe-interval motion planner: roadmap front end, B-spline back end"};
  app.require_subcommand(1);

  std::string scenario, out, cls = "sparse", log_path;
  uint64_t seed = 1;
  uint64_t plan_seed = 0;
  int trials = 100, threads = 0;
  bool deterministic = false;
  double min_sep = 5.0;

  auto* plan_cmd = app.add_subcommand("plan", "Plan one scenario and write a trajectory log");
  plan_cmd->add_option("scenario", scenario, "Scenario file")->required();
  plan_cmd->add_option("-o,--out", out, "Log path (default stdout)");
  auto* seed_opt = plan_cmd->add_option("--seed", plan_seed, "Override the graph sampling seed");
  plan_cmd->add_flag("--deterministic", deterministic, "Omit timings and disable wall-time caps");

  auto* bench_cmd = app.add_subcommand("bench", "Run randomized trials");
  bench_cmd->add_option("--class", cls, "sparse, moderate, dense or all")->capture_default_str();
  bench_cmd->add_option("--trials", trials, "Trials per class")->capture_default_str();
  bench_cmd->add_option("--seed", seed, "Base seed")->capture_default_str();
  bench_cmd->add_option("--out", out, "Output prefix (<out>.csv, <out>.summary.json)");
  bench_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");
  bench_cmd->add_flag("--deterministic", deterministic, "Omit timing columns");

  auto* verify_cmd = app.add_subcommand("verify", "Re-check a log with the dense oracle");
  verify_cmd->add_option("log", log_path, "Log file")->required();

  auto* gen_cmd = app.add_subcommand("gen", "Generate a random scenario file");
  gen_cmd->add_option("--class", cls, "sparse, moderate or dense")->capture_default_str();
  gen_cmd->add_option("--seed", seed, "Generator seed")->capture_default_str();
  gen_cmd->add_option("-o,--out", out, "Scenario path (default stdout)");
  gen_cmd->add_option("--min-separation", min_sep, "Start/goal distance")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*plan_cmd)
      return runPlan(scenario, out,
                     seed_opt->count() ? std::optional<uint64_t>(plan_seed) : std::nullopt,
                     deterministic);
    if (*bench_cmd) return runBench(cls, trials, seed, out, threads, deterministic);
    if (*verify_cmd) return runVerify(log_path);
    if (*gen_cmd) return runGen(cls, seed, out, min_sep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
