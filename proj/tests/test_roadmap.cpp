#include <gtest/gtest.h>

#include <random>
#include <set>

#include "sitmp/bench.hpp"
#include "sitmp/roadmap.hpp"
#include "sitmp/utvd.hpp"
#include "scenarios.hpp"
#include "test_util.hpp"

namespace sitmp {
namespace {

using testing::openWorld;

SafeIntervalSet si(std::vector<TimeInterval> v) { return SafeIntervalSet(std::move(v)); }

// ---- timing -------------------------------------------------------------

TEST(EarliestArrival, WaitsForTheNextInterval) {
  const std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  const auto tp = earliestArrival(v, {si({{0, 10}}), si({{3, 10}})}, std::vector<double>{2.0, 2.0}, DynamicBounds{}, 0.0);
  ASSERT_TRUE(tp);
  EXPECT_DOUBLE_EQ(tp->arrive[1], 2.0);
  EXPECT_DOUBLE_EQ(tp->depart[1], 3.0);
  EXPECT_DOUBLE_EQ(tp->arrive[2], 5.0);
  EXPECT_NO_THROW(tp->validate());
}

TEST(EarliestArrival, FreeEdgesNeverWait) {
  const std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 3, 0), Vec3(1, 3, 2)};
  const DynamicBounds b{2.0, 1.0};
  const auto tp = earliestArrival(v, {si({{0, 50}}), si({{0, 50}}), si({{0, 50}})}, b, 0.0);
  ASSERT_TRUE(tp);
  double sum = 0.0;
  for (size_t i = 0; i + 1 < v.size(); ++i) {
    sum += minTravelTime((v[i + 1] - v[i]).norm(), b);
    EXPECT_DOUBLE_EQ(tp->depart[i], tp->arrive[i]);
  }
  EXPECT_NEAR(tp->end(), sum, 1e-12);
}

TEST(EarliestArrival, InfeasibleWhenTheIntervalCloses) {
  const std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  EXPECT_FALSE(earliestArrival(v, {si({{0, 10}}), si({{0, 3}})}, std::vector<double>{2.0, 2.0}, DynamicBounds{}, 0.0));
  // hovering at vertex 1 is only allowed inside the incoming interval
  EXPECT_FALSE(earliestArrival(v, {si({{0, 2.5}}), si({{3, 10}})}, std::vector<double>{2.0, 2.0}, DynamicBounds{}, 0.0));
}

TEST(EarliestArrival, HoldAtStartVertex) {
  const std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0)};
  EXPECT_FALSE(earliestArrival(v, {si({{4, 10}})}, std::vector<double>{2.0}, DynamicBounds{}, 0.0));
  const auto tp = earliestArrival(v, {si({{4, 10}})}, std::vector<double>{2.0}, DynamicBounds{}, 0.0, 5.0);
  ASSERT_TRUE(tp);
  EXPECT_DOUBLE_EQ(tp->depart[0], 4.0);
  EXPECT_DOUBLE_EQ(tp->end(), 6.0);
}

TEST(EarliestArrival, PrefersALaterIntervalWhenItArrivesEarlier) {
  // The first interval of edge 1 leads to a dead end at edge 2.
  const std::vector<Vec3> v{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  const auto tp = earliestArrival(v, {si({{0, 2.5}, {3, 10}}), si({{6, 10}})},
                                  std::vector<double>{2.0, 2.0}, DynamicBounds{}, 0.0, 10.0);
  ASSERT_TRUE(tp);
  EXPECT_EQ(tp->chosen[0], TimeInterval(3, 10));
  EXPECT_DOUBLE_EQ(tp->end(), 8.0);
}

TEST(TemporalCorridor, Examples) {
  TimedPath tp;
  tp.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0)};
  tp.arrive = {0, 2, 6};
  tp.depart = {0, 4, 6};
  tp.chosen = {{0, 5}, {4, 9}};
  const auto c = temporalCorridor(tp);
  ASSERT_EQ(c.overlaps().size(), 1u);
  EXPECT_EQ(c.overlaps()[0], TimeInterval(4, 5));
  EXPECT_FALSE(c.reversed().forward);
  EXPECT_EQ(c.reversed().intervals.front(), TimeInterval(4, 9));

  TimedPath one = tp;
  one.vertices.pop_back();
  one.arrive.pop_back();
  one.depart.pop_back();
  one.chosen.pop_back();
  EXPECT_NO_THROW(temporalCorridor(one));

  tp.chosen = {{0, 5}, {6, 9}};
  EXPECT_THROW(temporalCorridor(tp), std::logic_error);
}

// ---- UTVD ---------------------------------------------------------------

TEST(Utvd, CrossingSceneClasses) {
  const auto scene = scenarios::crossingScene();
  const TimedPath red = scene.pathFrom(scenarios::kRedStart);
  const TimedPath blue = scene.pathFrom(scenarios::kBlueStart);
  const TimedPath green = scene.pathFrom(scenarios::kGreenStart);
  // green has to wait for both movers to clear x in [5, 6]
  EXPECT_GT(green.depart[1], 3.5);
  EXPECT_LT(red.end(), 3.0);
  EXPECT_TRUE(checkEquiv(red, blue, scene.env));
  EXPECT_FALSE(checkEquiv(red, green, scene.env));
  EXPECT_FALSE(checkEquiv(blue, green, scene.env));
  // stable when the resolution doubles
  EXPECT_TRUE(checkEquiv(red, blue, scene.env, 60));
  EXPECT_FALSE(checkEquiv(red, green, scene.env, 60));
}

TEST(Utvd, ReflexiveAndSymmetric) {
  const auto scene = scenarios::crossingScene();
  std::vector<TimedPath> paths;
  for (double t0 : {0.0, 0.1, 0.2, 0.7, 1.5, 2.0, 4.0, 5.0}) paths.push_back(scene.pathFrom(t0));
  for (const auto& a : paths) {
    EXPECT_TRUE(checkEquiv(a, a, scene.env));
    for (const auto& b : paths) EXPECT_EQ(checkEquiv(a, b, scene.env), checkEquiv(b, a, scene.env));
  }
}

TEST(Utvd, StaticWallSeparatesPaths) {
  StaticGrid g(Vec3::Zero(), 0.5, {10, 10, 2});
  for (int y = 3; y < 7; ++y)
    for (int z = 0; z < 2; ++z) g.setOccupied({4, y, z}, true);  // wall x in [2, 2.5], y in [1.5, 3.5]
  const Environment env(g, {}, {0, 20}, 0.1);
  const DynamicBounds b{2, 2};
  const SafeIntervalSet all = si({{0, 20}});
  const Vec3 s(2.25, 0.3, 0.5), e(2.25, 4.7, 0.5);
  const auto left = earliestArrival({s, Vec3(0.6, 2.5, 0.5), e}, {all, all}, b, 0.0);
  const auto right = earliestArrival({s, Vec3(3.9, 2.5, 0.5), e}, {all, all}, b, 0.0);
  ASSERT_TRUE(left && right);
  EXPECT_FALSE(checkEquiv(*left, *right, env));
  EXPECT_TRUE(checkEquiv(*left, *left, env));
}

TEST(Utvd, FreeWorldMakesEverythingEquivalent) {
  const Environment env = openWorld({10, 10, 4}, 0.5, {}, {0, 30}, 0.1);
  const DynamicBounds b{2, 2};
  const SafeIntervalSet all = si({{0, 30}});
  std::mt19937_64 rng(1);
  const Vec3 s(0.5, 0.5, 1), e(4.5, 4.5, 1);
  for (int n = 0; n < 20; ++n) {
    const Vec3 m1 = testing::uniformVec(rng, Vec3(0.3, 0.3, 0.3), Vec3(4.7, 4.7, 1.7));
    const Vec3 m2 = testing::uniformVec(rng, Vec3(0.3, 0.3, 0.3), Vec3(4.7, 4.7, 1.7));
    const auto a = earliestArrival({s, m1, e}, {all, all}, b, testing::uniform(rng, 0, 3));
    const auto c = earliestArrival({s, m2, e}, {all, all}, b, testing::uniform(rng, 0, 3));
    ASSERT_TRUE(a && c);
    EXPECT_TRUE(checkEquiv(*a, *c, env));
  }
}

TEST(Utvd, RejectsBadInput) {
  const auto scene = scenarios::crossingScene();
  const TimedPath red = scene.pathFrom(0.0);
  EXPECT_THROW(checkEquiv(red, red, scene.env, 1), std::invalid_argument);
  TimedPath other = red;
  other.vertices.back() += Vec3(0.5, 0, 0);
  EXPECT_THROW(checkEquiv(red, other, scene.env), std::invalid_argument);
}

// ---- graph --------------------------------------------------------------

TEST(Roadmap, EmptyWorldGivesOneConnector) {
  const Environment env = openWorld({20, 20, 6}, 0.5, {}, {0, 30}, 0.1);
  GraphBudget budget;
  budget.n_samples = 200;
  GraphStats st;
  const auto g = buildGraph(env, Vec3(1, 1, 1), Vec3(8, 9, 2), {}, budget, &st);
  ASSERT_EQ(g.vertices().size(), 3u);
  EXPECT_EQ(g.vertices()[0].kind, VertexKind::Guard);
  EXPECT_EQ(g.vertices()[1].kind, VertexKind::Guard);
  EXPECT_EQ(g.vertices()[2].kind, VertexKind::Connector);
  EXPECT_EQ(g.edges().size(), 2u);
  EXPECT_FALSE(g.edgeBetween(0, 1).has_value());
  EXPECT_EQ(st.new_guards, 0);
  // every later sample sees both guards and is in the same class
  EXPECT_EQ(st.new_connectors, 1);
  EXPECT_EQ(st.discarded_equivalent + st.replaced + 1, st.samples - st.rejected_static);
}

TEST(Roadmap, ReplacementShortensTheConnector) {
  const Environment env = openWorld({20, 20, 6}, 0.5, {}, {0, 30}, 0.1);
  GraphBudget budget;
  budget.n_samples = 1;
  const Vec3 s(1, 1, 1), e(8, 9, 2);
  auto g = buildGraph(env, s, e, {}, budget);
  double len = (g.vertices()[2].position - s).norm() + (g.vertices()[2].position - e).norm();
  std::mt19937_64 rng(5);
  for (int round = 0; round < 20; ++round) {
    growGraph(g, env, {}, budget, rng);
    const Vec3 c = g.vertices()[2].position;
    const double now = (c - s).norm() + (c - e).norm();
    EXPECT_LE(now, len);
    len = now;
  }
}

TEST(Roadmap, UnseenSamplesBecomeGuards) {
  StaticGrid grid(Vec3::Zero(), 0.5, {20, 20, 4});
  for (int y = 0; y < 20; ++y)
    for (int z = 0; z < 4; ++z) grid.setOccupied({10, y, z}, true);  // full wall at x in [5, 5.5]
  const Environment env(grid, {}, {0, 30}, 0.1);
  GraphBudget budget;
  budget.n_samples = 300;
  GraphStats st;
  const auto g = buildGraph(env, Vec3(1, 1, 1), Vec3(9, 9, 1), {}, budget, &st);
  EXPECT_GT(st.new_guards, 0);
  EXPECT_TRUE(extractPaths(g, RoadmapGraph::kStart, RoadmapGraph::kGoal).empty());
}

TEST(Roadmap, StartOrGoalBlocked) {
  StaticGrid grid(Vec3::Zero(), 0.5, {10, 10, 4});
  grid.setOccupied({2, 2, 2}, true);
  const Environment env(grid, {}, {0, 10}, 0.1);
  EXPECT_THROW(buildGraph(env, Vec3(1.25, 1.25, 1.25), Vec3(4, 4, 1), {}, {}), InputError);
  EXPECT_THROW(buildGraph(env, Vec3(4, 4, 1), Vec3(1.25, 1.25, 1.25), {}, {}), InputError);
}

class RoadmapStructure : public ::testing::TestWithParam<uint64_t> {};

TEST_P(RoadmapStructure, ConnectorsJoinTwoGuardsWithOverlap) {
  EnvGenParams p;
  p.density = DensityClass::Moderate;
  const Environment env = generateRandomEnv(p, GetParam());
  const auto [s, e] = sampleQuery(env, GetParam() + 100, 5.0);
  GraphBudget budget;
  budget.seed = GetParam();
  const DynamicBounds b;
  const auto g = buildGraph(env, s, e, b, budget);
  EXPECT_EQ(g.vertices()[0].kind, VertexKind::Guard);
  EXPECT_EQ(g.vertices()[1].kind, VertexKind::Guard);
  for (size_t v = 0; v < g.vertices().size(); ++v) {
    if (g.vertices()[v].kind != VertexKind::Connector) continue;
    const auto& inc = g.incident(static_cast<int>(v));
    ASSERT_EQ(inc.size(), 2u);
    const auto& e1 = g.edges()[inc[0]];
    const auto& e2 = g.edges()[inc[1]];
    EXPECT_EQ(g.vertices()[e1.other(static_cast<int>(v))].kind, VertexKind::Guard);
    EXPECT_EQ(g.vertices()[e2.other(static_cast<int>(v))].kind, VertexKind::Guard);
    EXPECT_FALSE(intersect(e1.si, e2.si).empty());
  }
  for (const auto& ed : g.edges()) {
    EXPECT_FALSE(ed.si.empty());
    for (const auto& iv : ed.si) EXPECT_GT(iv.length(), ed.t_min);
    EXPECT_NEAR(ed.t_min, minTravelTime(ed.length, b), 1e-12);
    EXPECT_TRUE(edgeStaticFree(env, g.vertices()[ed.a].position, g.vertices()[ed.b].position));
  }
  // guards never see each other directly
  const auto guards = g.guards();
  for (size_t i = 0; i < guards.size(); ++i)
    for (size_t j = i + 1; j < guards.size(); ++j)
      EXPECT_FALSE(g.edgeBetween(guards[i], guards[j]).has_value());
}

TEST_P(RoadmapStructure, TimedPathsAreSafeUnderDenseSampling) {
  EnvGenParams p;
  p.density = DensityClass::Dense;
  const Environment env = generateRandomEnv(p, GetParam());
  const auto [s, e] = sampleQuery(env, GetParam() + 7, 5.0);
  GraphBudget budget;
  budget.seed = GetParam();
  budget.n_samples = 1500;
  const DynamicBounds b;
  const auto g = buildGraph(env, s, e, b, budget);
  const auto paths = extractTimedPaths(g, RoadmapGraph::kStart, RoadmapGraph::kGoal, b, 0.0);
  for (const auto& tp : paths) {
    EXPECT_NO_THROW(tp.validate());
    EXPECT_NO_THROW(temporalCorridor(tp));
    for (double t = tp.start(); t <= tp.end(); t += 0.01) {
      const Vec3 q = tp.position(t);
      EXPECT_FALSE(env.grid().blockedWithin(q, env.robotRadius()));
      EXPECT_TRUE(isPointFree(env, q, t)) << "t=" << t;
    }
  }
}

TEST_P(RoadmapStructure, DeterministicForFixedSeed) {
  EnvGenParams p;
  p.density = DensityClass::Sparse;
  const Environment env = generateRandomEnv(p, GetParam());
  const auto [s, e] = sampleQuery(env, GetParam(), 5.0);
  GraphBudget budget;
  budget.seed = GetParam() * 3 + 1;
  EXPECT_EQ(graphToJson(buildGraph(env, s, e, {}, budget)).dump(),
            graphToJson(buildGraph(env, s, e, {}, budget)).dump());
}

INSTANTIATE_TEST_SUITE_P(Seeds, RoadmapStructure, ::testing::Values(1u, 2u, 3u));

TEST(Sampler, UniformWhenNoRatiosExist) {
  RoadmapGraph g;
  const Box3 bounds{Vec3::Zero(), Vec3(4, 4, 4)};
  std::mt19937_64 a(3), b(3);
  for (int n = 0; n < 10; ++n) {
    const Vec3 p = getSample(g, bounds, a, 0.0);
    EXPECT_TRUE(bounds.contains(p));
    EXPECT_EQ(p, getSample(g, bounds, b, 0.0));
  }
}

TEST(Sampler, BiasesTowardTheLowestRatioCell) {
  const Box3 bounds{Vec3::Zero(), Vec3(4, 4, 4)};
  RoadmapGraph g;
  // cell 0 ([0,1]^3): 3 guards, 0 connectors; cell 63: 2 and 2
  for (int i = 0; i < 3; ++i) g.addVertex(Vec3(0.2 + 0.2 * i, 0.5, 0.5), VertexKind::Guard);
  for (int i = 0; i < 2; ++i) g.addVertex(Vec3(3.2 + 0.2 * i, 3.5, 3.5), VertexKind::Guard);
  for (int i = 0; i < 2; ++i) g.addVertex(Vec3(3.5, 3.2 + 0.2 * i, 3.5), VertexKind::Connector);
  const auto r = cellRatios(g, bounds);
  EXPECT_EQ(*r.lowestRatioCell(), 0);
  std::mt19937_64 rng(9);
  for (int n = 0; n < 50; ++n) {
    const Vec3 p = getSample(g, bounds, rng, 0.0);
    EXPECT_EQ(CellRatios::cellOf(bounds, p), 0);
  }
}

TEST(Sampler, TiesGoToTheLowestIndex) {
  CellRatios r;
  r.guards[5] = 2;
  r.guards[9] = 4;
  r.connectors[5] = 1;
  r.connectors[9] = 2;
  EXPECT_EQ(*r.lowestRatioCell(), 5);
}

RoadmapGraph chainGraph() {
  // start(0) - c2 - g3 - c4 - goal(1) and start - c5 - goal; g6 isolated
  RoadmapGraph g;
  const SafeIntervalSet all = si({{0, 100}});
  g.addVertex(Vec3(0, 0, 0), VertexKind::Guard);
  g.addVertex(Vec3(4, 0, 0), VertexKind::Guard);
  g.addVertex(Vec3(1, 1, 0), VertexKind::Connector);
  g.addVertex(Vec3(2, 1, 0), VertexKind::Guard);
  g.addVertex(Vec3(3, 1, 0), VertexKind::Connector);
  g.addVertex(Vec3(2, -1, 0), VertexKind::Connector);
  g.addVertex(Vec3(9, 9, 9), VertexKind::Guard);
  auto link = [&](int a, int b) {
    const double d = (g.vertices()[a].position - g.vertices()[b].position).norm();
    g.addEdge(a, b, all, minTravelTime(d, {}));
  };
  link(0, 2);
  link(2, 3);
  link(3, 4);
  link(4, 1);
  link(0, 5);
  link(5, 1);
  return g;
}

TEST(ExtractPaths, Examples) {
  const auto g = chainGraph();
  const auto paths = extractPaths(g, 0, 1);
  ASSERT_EQ(paths.size(), 2u);
  std::set<VertexPath> unique(paths.begin(), paths.end());
  EXPECT_EQ(unique.size(), 2u);
  EXPECT_EQ(extractPaths(g, 0, 1, 1).size(), 1u);
  EXPECT_TRUE(extractPaths(g, 0, 6).empty());
  // vertex cap drops the five-vertex chain
  EXPECT_EQ(extractPaths(g, 0, 1, 8, 4).size(), 1u);
}

TEST(ExtractPaths, TimedSearchMatchesPerPathTiming) {
  const auto g = chainGraph();
  const auto timed = extractTimedPaths(g, 0, 1, {}, 0.0);
  ASSERT_EQ(timed.size(), 2u);
  for (const auto& vp : extractPaths(g, 0, 1)) {
    const auto tp = timeParameterize(vp, g, {}, 0.0);
    ASSERT_TRUE(tp);
    bool found = false;
    for (const auto& t : timed) found = found || (t.vertices == tp->vertices && t.end() == tp->end());
    EXPECT_TRUE(found);
  }
}

}  // namespace
}  // namespace sitmp
