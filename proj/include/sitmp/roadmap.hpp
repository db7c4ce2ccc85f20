#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <json.hpp>

#include "sitmp/environment.hpp"
#include "sitmp/intervals.hpp"
#include "sitmp/kinematics.hpp"
#include "sitmp/timed_path.hpp"

namespace sitmp {

enum class VertexKind { Guard, Connector };

struct RoadmapVertex {
  Vec3 position;
  VertexKind kind = VertexKind::Guard;
  /// End of the point's own safe window starting at the horizon start; a
  /// path leaving this vertex may wait here until then.
  double hold_until = -kInfinity;
};

struct RoadmapEdge {
  int a = -1;
  int b = -1;
  double length = 0.0;
  SafeIntervalSet si;
  double t_min = 0.0;

  int other(int v) const { return v == a ? b : a; }
};

/// Dynamic connected visibility graph: guards plus connectors that each join
/// exactly two guards through edges carrying safe intervals.
class RoadmapGraph {
 public:
  static constexpr int kStart = 0;
  static constexpr int kGoal = 1;

  int addVertex(const Vec3& p, VertexKind kind, double hold_until = -kInfinity);
  int addEdge(int a, int b, SafeIntervalSet si, double t_min);
  /// Move a connector and refresh its two edges.
  void relocateConnector(int v, const Vec3& p, SafeIntervalSet si_a, SafeIntervalSet si_b,
                         double t_min_a, double t_min_b);

  const std::vector<RoadmapVertex>& vertices() const { return vertices_; }
  const std::vector<RoadmapEdge>& edges() const { return edges_; }
  const std::vector<int>& incident(int v) const { return adjacency_[v]; }
  std::optional<int> edgeBetween(int a, int b) const;
  /// Connectors adjacent to both guards.
  std::vector<int> sharedConnectors(int g1, int g2) const;
  std::vector<int> guards() const;
  size_t connectorCount() const;

  uint64_t rng_seed = 0;

 private:
  std::vector<RoadmapVertex> vertices_;
  std::vector<RoadmapEdge> edges_;
  std::vector<std::vector<int>> adjacency_;
};

struct GraphBudget {
  int n_samples = 600;
  /// Wall-clock cap in milliseconds; <= 0 disables it (deterministic builds).
  double wall_ms = 0.0;
  uint64_t seed = 1;
  double p_uniform = 0.5;
  int equiv_samples = 30;
};

/// Statistics from one construction run.
struct GraphStats {
  int samples = 0;
  int rejected_static = 0;
  int new_guards = 0;
  int new_connectors = 0;
  int replaced = 0;
  int discarded_overlap = 0;
  int discarded_visibility = 0;
  int discarded_equivalent = 0;
};

/// Guards and connectors per cell of a fixed two-level octree (4x4x4 cells).
struct CellRatios {
  static constexpr int kCells = 64;
  std::array<int, kCells> guards{};
  std::array<int, kCells> connectors{};
  static int cellOf(const Box3& bounds, const Vec3& p);
  static Box3 cellBox(const Box3& bounds, int cell);
  /// Cell with the lowest connector/guard ratio among cells holding guards.
  std::optional<int> lowestRatioCell() const;
};

CellRatios cellRatios(const RoadmapGraph& graph, const Box3& bounds);

/// With probability p_uniform a uniform draw over `bounds`; otherwise uniform
/// inside the octree cell with the lowest connector/guard ratio.
Vec3 getSample(const RoadmapGraph& graph, const Box3& bounds, std::mt19937_64& rng,
               double p_uniform = 0.5);

/// End of the safe window of point p that contains the horizon start, or
/// -infinity if p is not safe then.
double pointHoldUntil(const Environment& env, const Vec3& p);

/// Region the sampler draws from: the grid bounds shrunk by the robot radius.
Box3 samplingBounds(const Environment& env);

/// Builds the graph. Throws InputError if start or goal is statically blocked.
RoadmapGraph buildGraph(const Environment& env, const Vec3& x_s, const Vec3& x_g,
                        const DynamicBounds& bounds, const GraphBudget& budget,
                        GraphStats* stats = nullptr);

/// Continue sampling into an existing graph with a caller-owned generator.
void growGraph(RoadmapGraph& graph, const Environment& env, const DynamicBounds& bounds,
               const GraphBudget& budget, std::mt19937_64& rng, GraphStats* stats = nullptr);

using VertexPath = std::vector<int>;

/// Depth-first enumeration of up to k_max simple start-to-goal paths with at
/// most `vertex_cap` vertices each. Neighbors are expanded nearest-to-goal
/// first (ties by id).
std::vector<VertexPath> extractPaths(const RoadmapGraph& graph, int start, int goal, int k_max = 8,
                                     int vertex_cap = 12);

/// Earliest-arrival timing of a graph path starting at t_start.
std::optional<TimedPath> timeParameterize(const VertexPath& path, const RoadmapGraph& graph,
                                          const DynamicBounds& bounds, double t_start);

/// Depth-first search like extractPaths() that carries the earliest-arrival
/// recursion along and prunes prefixes with no feasible timing. Returns up
/// to k_max timed paths in discovery order.
std::vector<TimedPath> extractTimedPaths(const RoadmapGraph& graph, int start, int goal,
                                         const DynamicBounds& bounds, double t_start,
                                         int k_max = 8, int vertex_cap = 12);

/// Chained per-edge safe intervals of a timed path.
struct TemporalCorridor {
  std::vector<TimeInterval> intervals;
  bool forward = true;

  /// Overlap windows of consecutive intervals.
  std::vector<TimeInterval> overlaps() const;
  TemporalCorridor reversed() const;
};

/// Throws std::logic_error if two consecutive chosen intervals do not overlap.
TemporalCorridor temporalCorridor(const TimedPath& tp);

inline constexpr const char* kGraphSchema = "sitmp-graph/1";
nlohmann::json graphToJson(const RoadmapGraph& graph);

}  // namespace sitmp
