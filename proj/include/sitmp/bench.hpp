#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sitmp/planner.hpp"

namespace sitmp {

/// SplitMix64 finalizer; used to derive per-trial and per-environment seeds.
uint64_t splitmix64(uint64_t x);

enum class TrialOutcome { Success, FrontEndFail, BackEndFail, OracleFail };
std::string toString(TrialOutcome o);

struct TrialRecord {
  int index = 0;
  uint64_t seed = 0;
  uint64_t env_seed = 0;
  DensityClass density = DensityClass::Sparse;
  TrialOutcome outcome = TrialOutcome::FrontEndFail;
  Vec3 start = Vec3::Zero();
  Vec3 goal = Vec3::Zero();
  double front_end_ms = 0.0;
  double total_ms = 0.0;
  double path_length = 0.0;
  double flight_time = 0.0;
  double control_cost = 0.0;
  double initial_control_cost = 0.0;
  int candidates = 0;
  std::string note;  // failure message or oracle violation
  std::optional<UniformBSpline> trajectory;  // best spline when planning succeeded
};

struct BenchParams {
  DensityClass density = DensityClass::Sparse;
  int n_trials = 100;
  uint64_t base_seed = 1;
  double min_separation = 5.0;
  int trials_per_env = 3;
  int threads = 0;  // 0: hardware concurrency
  EnvGenParams env;
  PlanRequest request;  // start, goal and graph seed are filled per trial
};

struct BatchResult {
  std::vector<TrialRecord> records;
  nlohmann::json summary;
};

/// Seed of the environment shared by trials [g * per_env, (g + 1) * per_env).
uint64_t envSeedFor(uint64_t base_seed, DensityClass c, int group);
/// Seed of trial `index` (start/goal draw and graph sampling).
uint64_t trialSeedFor(uint64_t base_seed, DensityClass c, int index);

/// Mask over grid cells: 1 for cells in the largest 6-connected set of cells
/// whose centers are statically clear.
std::vector<uint8_t> largestFreeRegion(const Environment& env);

/// Rejection-samples a start/goal pair: statically free, no obstacle passing
/// over either point during the horizon, at least `min_separation` apart, and
/// each joined by a free segment to a cell center of the largest free region.
/// Throws InputError after 20000 attempts.
std::pair<Vec3, Vec3> sampleQuery(const Environment& env, uint64_t seed, double min_separation);

/// Independent dense check used to label trials: exact grid distance, point
/// freeness against every obstacle, finite-difference velocity and
/// acceleration against the bounds with `slack`.
std::optional<Violation> oracleCheck(const UniformBSpline& s, const Environment& env,
                                     const DynamicBounds& bounds, double dt = 0.01,
                                     double slack = 1e-2);

/// One planning trial on a given environment.
TrialRecord runTrial(const Environment& env, const BenchParams& p, int index, uint64_t env_seed);

/// Trials run in a worker pool; each worker handles whole environment groups.
/// Records come back sorted by index.
BatchResult runBatch(const BenchParams& p, bool with_timings = true);

std::string recordsToCsv(const std::vector<TrialRecord>& records, bool with_timings);
nlohmann::json summarize(const std::vector<TrialRecord>& records, bool with_timings);

}  // namespace sitmp
