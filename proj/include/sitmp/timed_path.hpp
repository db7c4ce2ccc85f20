#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "sitmp/intervals.hpp"
#include "sitmp/kinematics.hpp"

namespace sitmp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Vertex sequence with arrival/departure times. Each edge is flown rest to
/// rest with the time-optimal profile inside the edge's chosen safe interval;
/// the robot may hover at a vertex between arrival and departure.
struct TimedPath {
  std::vector<Vec3> vertices;
  std::vector<double> arrive;
  std::vector<double> depart;
  std::vector<TimeInterval> chosen;  // one per edge
  DynamicBounds bounds;

  size_t edgeCount() const { return chosen.size(); }
  double start() const { return arrive.front(); }
  double end() const { return arrive.back(); }
  double duration() const { return end() - start(); }
  double length() const;

  /// Position at absolute time t (held at the endpoints outside the span).
  Vec3 position(double t) const;

  /// Throws std::logic_error naming the first broken invariant.
  void validate() const;
};

/// One step of the earliest-arrival recursion: for each safe interval of an
/// edge, the earliest arrival at the edge's far end using that interval, the
/// matching departure and the interval index used on the previous edge.
struct ArrivalLayer {
  std::vector<double> arrival;
  std::vector<double> departure;
  std::vector<int> parent;
  bool feasible() const;
};

/// Layer of the first edge; the robot may hold at its start until hold_until.
ArrivalLayer firstArrivalLayer(const SafeIntervalSet& si, double duration, double t_start,
                               double hold_until);
/// Layer of the next edge. Hovering at the shared vertex must stay inside the
/// interval the previous edge used.
ArrivalLayer nextArrivalLayer(const ArrivalLayer& prev, const SafeIntervalSet& prev_si,
                              const SafeIntervalSet& si, double duration);
/// Timed path from a complete, feasible stack of layers.
TimedPath assembleTimedPath(const std::vector<Vec3>& vertices,
                            const std::vector<SafeIntervalSet>& edge_si,
                            const std::vector<ArrivalLayer>& layers, const DynamicBounds& bounds,
                            double t_start);

/// Earliest-arrival timing of a vertex path, SIPP style: each edge departs as
/// early as possible inside one of its safe intervals, and hovering at a vertex
/// is allowed only while the incoming edge's chosen interval still covers it.
/// `durations[i]` is the traversal time of edge i. The robot may hold at the
/// first vertex until `hold_until` (the end of that point's own safe window).
/// Returns nullopt when no interval sequence is feasible.
std::optional<TimedPath> earliestArrival(const std::vector<Vec3>& vertices,
                                         const std::vector<SafeIntervalSet>& edge_si,
                                         const std::vector<double>& durations,
                                         const DynamicBounds& bounds, double t_start,
                                         double hold_until = -kInfinity);

/// Same, with durations from minTravelTime on each edge length.
std::optional<TimedPath> earliestArrival(const std::vector<Vec3>& vertices,
                                         const std::vector<SafeIntervalSet>& edge_si,
                                         const DynamicBounds& bounds, double t_start,
                                         double hold_until = -kInfinity);

}  // namespace sitmp
