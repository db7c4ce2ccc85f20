#pragma once

#include <optional>
#include <vector>

#include "sitmp/environment.hpp"

namespace sitmp {

/// Sorted, pairwise-disjoint list of closed time windows, each of positive length.
class SafeIntervalSet {
 public:
  SafeIntervalSet() = default;
  /// Validates the ordering/disjointness invariants; throws std::invalid_argument.
  explicit SafeIntervalSet(std::vector<TimeInterval> intervals);

  const std::vector<TimeInterval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  size_t size() const { return intervals_.size(); }
  const TimeInterval& operator[](size_t i) const { return intervals_[i]; }
  auto begin() const { return intervals_.begin(); }
  auto end() const { return intervals_.end(); }

  /// Index of the member containing t, if any.
  std::optional<size_t> find(double t) const;

  friend bool operator==(const SafeIntervalSet&, const SafeIntervalSet&) = default;

 private:
  std::vector<TimeInterval> intervals_;
};

/// Sort and union overlapping or touching windows.
std::vector<TimeInterval> mergeIntervals(std::vector<TimeInterval> v);
/// Closed complement of (open) collision windows inside `horizon`.
std::vector<TimeInterval> complementIn(const std::vector<TimeInterval>& blocked,
                                       const TimeInterval& horizon);
/// Keep windows strictly longer than t_min.
SafeIntervalSet filterLongerThan(const std::vector<TimeInterval>& v, double t_min);
/// Pairwise intersections with positive length.
std::vector<TimeInterval> intersect(const SafeIntervalSet& a, const SafeIntervalSet& b);

/// Axis-aligned box covering an edge, grown by the obstacle + robot margin.
struct InflatedCuboid {
  Vec3 b_lo;
  Vec3 b_hi;

  Box3 box() const { return {b_lo, b_hi}; }
};

/// Bounding box of {p1, p2} expanded by `margin` per axis. Margin must be > 0
/// on every axis (std::invalid_argument otherwise).
InflatedCuboid edgeCuboid(const Vec3& p1, const Vec3& p2, const Vec3& margin);

/// Maximal windows (open) during which the obstacle center lies in `box`,
/// restricted to `horizon`. Exact up to root-polish tolerance: the per-axis
/// hyperplane crossing times partition the horizon and each cell is classified
/// by its midpoint. Touching the boundary counts as inside.
std::vector<TimeInterval> cuboidCollisionIntervals(const Box3& box, const MovingObstacle& obs,
                                                   const TimeInterval& horizon);
inline std::vector<TimeInterval> cuboidCollisionIntervals(const InflatedCuboid& c,
                                                          const MovingObstacle& obs,
                                                          const TimeInterval& horizon) {
  return cuboidCollisionIntervals(c.box(), obs, horizon);
}

/// Default length of the pieces a segment is split into for collision windows.
inline constexpr double kSegmentPiece = 1.0;

/// Bounding boxes of the equal pieces (each at most `max_piece` long) of a
/// segment.
std::vector<Box3> segmentPieces(const Vec3& p1, const Vec3& p2, double max_piece = kSegmentPiece);

/// Union over all obstacles and segment pieces of the collision windows of
/// the piece boxes (margin = robot radius + semi-axes) inside `window`.
std::vector<TimeInterval> segmentCollisionIntervals(const Environment& env, const Vec3& p1,
                                                    const Vec3& p2, const TimeInterval& window,
                                                    double max_piece = kSegmentPiece);

/// Collision windows of an arbitrary robot-position box (each obstacle's box is
/// `box` inflated by robot radius + semi-axes) inside `window`.
std::vector<TimeInterval> boxCollisionIntervals(const Environment& env, const Box3& box,
                                                const TimeInterval& window);

/// True iff the segment swept by a ball of the robot radius touches no
/// occupied cell. Conservative sub-resolution marching.
bool edgeStaticFree(const Environment& env, const Vec3& p1, const Vec3& p2);

/// Safe intervals of the edge: complement of all collision windows over the
/// horizon, keeping windows strictly longer than t_min. Empty when the edge is
/// statically blocked.
SafeIntervalSet edgeSafeIntervals(const Environment& env, const Vec3& p1, const Vec3& p2,
                                  double t_min);

}  // namespace sitmp
