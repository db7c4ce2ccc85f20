#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sitmp/environment.hpp"
#include "sitmp/polynomial.hpp"
#include "sitmp/scenario_io.hpp"
#include "test_util.hpp"

namespace sitmp {
namespace {

using testing::fixedObstacle;
using testing::linearObstacle;
using testing::openWorld;

TEST(Polynomial, EvaluatesLowestDegreeFirst) {
  const Polynomial p({1.0, -2.0, 3.0});
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
  EXPECT_DOUBLE_EQ(p(2.0), 1.0 - 4.0 + 12.0);
  EXPECT_EQ(p.degree(), 2);
  EXPECT_EQ(p.derivative().coeffs(), (std::vector<double>{-2.0, 6.0}));
}

TEST(Polynomial, RejectsDegreeAboveCap) {
  EXPECT_THROW(Polynomial(std::vector<double>(7, 1.0)), InputError);
  EXPECT_NO_THROW(Polynomial(std::vector<double>(6, 1.0)));
}

TEST(Polynomial, RootsOfKnownProducts) {
  // (t - 1)(t - 2)(t - 4) = t^3 - 7t^2 + 14t - 8
  const Polynomial p({-8.0, 14.0, -7.0, 1.0});
  const auto r = realRoots(p, 0.0, 5.0);
  ASSERT_EQ(r.size(), 3u);
  EXPECT_NEAR(r[0], 1.0, 1e-9);
  EXPECT_NEAR(r[1], 2.0, 1e-9);
  EXPECT_NEAR(r[2], 4.0, 1e-9);
  EXPECT_EQ(realRoots(p, 2.5, 3.5).size(), 0u);
  // double root reported once
  const auto t = realRoots(Polynomial({1.0, -2.0, 1.0}), -1.0, 3.0);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_NEAR(t[0], 1.0, 1e-6);
}

TEST(Polynomial, RangeMatchesDenseSampling) {
  std::mt19937_64 rng(3);
  for (int n = 0; n < 50; ++n) {
    std::vector<double> c(6);
    for (double& v : c) v = testing::uniform(rng, -2.0, 2.0);
    const Polynomial p(c);
    const auto [lo, hi] = p.range(-1.0, 1.5);
    double slo = p(-1.0), shi = p(-1.0);
    for (int k = 0; k <= 25000; ++k) {
      const double v = p(-1.0 + 2.5 * k / 25000.0);
      slo = std::min(slo, v);
      shi = std::max(shi, v);
    }
    EXPECT_LE(lo, slo + 1e-9);
    EXPECT_GE(hi, shi - 1e-9);
    EXPECT_NEAR(lo, slo, 1e-5);
    EXPECT_NEAR(hi, shi, 1e-5);
  }
}

TEST(Environment, EllipsoidDistanceExamples) {
  const auto unit = fixedObstacle(Vec3::Zero(), Vec3::Ones(), {0, 10});
  EXPECT_DOUBLE_EQ(ellipsoidDistance(Vec3(3, 0, 0), unit, 1.0), 3.0);
  const auto stretched = fixedObstacle(Vec3::Zero(), Vec3(2, 1, 1), {0, 10});
  EXPECT_DOUBLE_EQ(ellipsoidDistance(Vec3(4, 0, 0), stretched, 1.0), 2.0);
  EXPECT_DOUBLE_EQ(ellipsoidDistance(Vec3::Zero(), unit, 1.0), 0.0);
}

TEST(Environment, EllipsoidDistanceTranslationInvariant) {
  const auto o = linearObstacle(Vec3(1, 2, 3), Vec3(0.5, -0.2, 0.1), Vec3(0.3, 0.4, 0.5), {0, 10});
  const Vec3 shift(2.0, -1.0, 0.5);
  auto moved = o;
  for (int k = 0; k < 3; ++k) moved.coeffs[k] = Polynomial({o.coeffs[k].coeffs()[0] + shift[k], o.coeffs[k].coeffs()[1]});
  const Vec3 p(1.4, 2.3, 2.9);
  EXPECT_NEAR(ellipsoidDistance(p, o, 4.0), ellipsoidDistance(p + shift, moved, 4.0), 1e-12);
}

TEST(Environment, ObstacleParksOutsideActiveWindow) {
  const auto o = linearObstacle(Vec3(1, 1, 1), Vec3(1, 0, 0), Vec3::Constant(0.2), {2, 4});
  EXPECT_DOUBLE_EQ(o.center(0.0).x(), 1.0);
  EXPECT_DOUBLE_EQ(o.center(3.0).x(), 2.0);
  EXPECT_DOUBLE_EQ(o.center(9.0).x(), 3.0);
}

TEST(Environment, PointFreeness) {
  const double r = 0.1;
  const auto o = fixedObstacle(Vec3(2, 2, 1), Vec3::Constant(0.3), {0, 10});
  const Environment env = openWorld({10, 10, 4}, 0.5, {o}, {0, 10}, r);
  EXPECT_TRUE(isPointFree(env, Vec3(4, 4, 1), 1.0));
  EXPECT_FALSE(isPointFree(env, Vec3(2, 2, 1), 1.0));
  // exactly on the inflated surface plus a hair
  EXPECT_TRUE(isPointFree(env, Vec3(2 + 0.3 + r + 1e-6, 2, 1), 1.0));
  EXPECT_FALSE(isPointFree(env, Vec3(2 + 0.3 + r - 1e-6, 2, 1), 1.0));
  EXPECT_FALSE(isPointFree(env, Vec3(-1, 2, 1), 1.0));
}

TEST(Environment, InflationIsMonotone) {
  std::mt19937_64 rng(11);
  const auto o = linearObstacle(Vec3(2, 2, 1), Vec3(0.3, 0.1, 0), Vec3(0.3, 0.2, 0.4), {0, 10});
  const Environment small = openWorld({10, 10, 4}, 0.5, {o}, {0, 10}, 0.05);
  const Environment big = openWorld({10, 10, 4}, 0.5, {o}, {0, 10}, 0.2);
  for (int n = 0; n < 2000; ++n) {
    const Vec3 p = testing::uniformVec(rng, Vec3(0.5, 0.5, 0.5), Vec3(4.5, 4.5, 1.5));
    const double t = testing::uniform(rng, 0, 10);
    if (!isPointFree(small, p, t)) {
      EXPECT_FALSE(isPointFree(big, p, t));
    }
  }
}

TEST(Environment, BlockedWithinUsesExactCellDistance) {
  StaticGrid g(Vec3::Zero(), 1.0, {5, 5, 5});
  g.setOccupied({2, 2, 2}, true);
  EXPECT_TRUE(g.blockedWithin(Vec3(2.5, 2.5, 2.5), 0.0));
  EXPECT_TRUE(g.blockedWithin(Vec3(1.8, 2.5, 2.5), 0.2));
  EXPECT_FALSE(g.blockedWithin(Vec3(1.7, 2.5, 2.5), 0.29));
  // corner distance is Euclidean
  EXPECT_FALSE(g.blockedWithin(Vec3(1.7, 1.7, 2.5), 0.4));
  EXPECT_TRUE(g.blockedWithin(Vec3(1.7, 1.7, 2.5), 0.43));
  // outside the grid counts as occupied
  EXPECT_TRUE(g.blockedWithin(Vec3(0.1, 1.5, 1.5), 0.15));
}

TEST(Environment, StaticClearAgreesWithExactCheck) {
  EnvGenParams p;
  p.density = DensityClass::Dense;
  const Environment env = generateRandomEnv(p, 5);
  std::mt19937_64 rng(9);
  for (int n = 0; n < 20000; ++n) {
    const Vec3 q = testing::uniformVec(rng, Vec3::Zero(), Vec3(20, 20, 5));
    EXPECT_EQ(env.staticClear(q), !env.grid().blockedWithin(q, env.robotRadius())) << q.transpose();
  }
}

TEST(Environment, RejectsBadConstruction) {
  auto o = fixedObstacle(Vec3::Ones(), Vec3::Constant(0.2), {0, 20});
  EXPECT_THROW(openWorld({4, 4, 4}, 0.5, {o}, {0, 10}, 0.1), ConfigError);
  auto flat = fixedObstacle(Vec3::Ones(), Vec3(0.2, 0.0, 0.2), {0, 10});
  EXPECT_THROW(openWorld({4, 4, 4}, 0.5, {flat}, {0, 10}, 0.1), ConfigError);
  EXPECT_THROW(openWorld({4, 4, 4}, 0.5, {}, {0, 10}, -0.1), ConfigError);
}

struct ClassCase {
  DensityClass c;
  uint64_t seed;
};

class GeneratorRanges : public ::testing::TestWithParam<ClassCase> {};

TEST_P(GeneratorRanges, DensityAndCountWithinClass) {
  EnvGenParams p;
  p.density = GetParam().c;
  const Environment env = generateRandomEnv(p, GetParam().seed);
  const auto [dlo, dhi] = p.densityRange();
  const auto [nlo, nhi] = p.obstacleCountRange();
  EXPECT_GE(env.grid().density(), dlo);
  EXPECT_LE(env.grid().density(), dhi);
  EXPECT_GE(static_cast<int>(env.obstacles().size()), nlo);
  EXPECT_LE(static_cast<int>(env.obstacles().size()), nhi);
  const Box3 ws = env.grid().bounds();
  for (const auto& o : env.obstacles()) {
    for (int k = 0; k <= 300; ++k) {
      const double t = env.horizon().lo + env.horizon().length() * k / 300.0;
      const Vec3 c = o.center(t);
      EXPECT_TRUE(ws.contains(c));
    }
    for (int k = 0; k < 3; ++k) {
      const auto [vlo, vhi] = o.coeffs[k].derivative().range(0.0, o.active.length());
      EXPECT_LE(std::max(std::abs(vlo), std::abs(vhi)), p.v_obs_max + 1e-9);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Classes, GeneratorRanges,
                         ::testing::Values(ClassCase{DensityClass::Sparse, 1},
                                           ClassCase{DensityClass::Moderate, 3},
                                           ClassCase{DensityClass::Dense, 7},
                                           ClassCase{DensityClass::Dense, 12}));

TEST(Generator, PinnedRanges) {
  EnvGenParams p;
  p.density = DensityClass::Sparse;
  EXPECT_EQ(p.densityRange(), (std::pair<double, double>{0.0, 0.01}));
  EXPECT_EQ(p.obstacleCountRange(), (std::pair<int, int>{0, 20}));
  p.density = DensityClass::Moderate;
  EXPECT_EQ(p.densityRange(), (std::pair<double, double>{0.05, 0.1}));
  EXPECT_EQ(p.obstacleCountRange(), (std::pair<int, int>{20, 40}));
  p.density = DensityClass::Dense;
  EXPECT_EQ(p.densityRange(), (std::pair<double, double>{0.15, 0.2}));
  EXPECT_EQ(p.obstacleCountRange(), (std::pair<int, int>{40, 60}));
}

TEST(Generator, Deterministic) {
  EnvGenParams p;
  p.density = DensityClass::Moderate;
  EXPECT_EQ(generateRandomEnv(p, 42), generateRandomEnv(p, 42));
  EXPECT_FALSE(generateRandomEnv(p, 42) == generateRandomEnv(p, 43));
  EXPECT_EQ(writeScenario({generateRandomEnv(p, 42)}), writeScenario({generateRandomEnv(p, 42)}));
}

TEST(Generator, UnknownClassName) {
  EXPECT_THROW(parseDensityClass("crowded"), ConfigError);
  EXPECT_EQ(parseDensityClass("dense"), DensityClass::Dense);
}

TEST(ScenarioIo, RoundTripsExactly) {
  EnvGenParams p;
  p.density = DensityClass::Dense;
  Scenario s{generateRandomEnv(p, 21)};
  s.start = Vec3(1.25, 2.5, 1.0 / 3.0);
  s.goal = Vec3(10.1, 12.7, 2.2);
  s.planner = {{"k_max", 4}};
  const std::string text = writeScenario(s);
  const Scenario back = readScenario(text);
  EXPECT_EQ(back.env, s.env);
  EXPECT_EQ(*back.start, *s.start);
  EXPECT_EQ(*back.goal, *s.goal);
  EXPECT_EQ(back.planner, s.planner);
  EXPECT_EQ(writeScenario(back), text);
}

TEST(ScenarioIo, RejectsWrongSchema) {
  auto j = scenarioToJson({openWorld({2, 2, 2}, 1.0, {}, {0, 1}, 0.1)});
  j["schema"] = "sitmp-scenario/9";
  EXPECT_THROW(scenarioFromJson(j), ParseError);
  EXPECT_THROW(readScenario("{not json"), ParseError);
}

}  // namespace
}  // namespace sitmp
