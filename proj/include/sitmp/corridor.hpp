#pragma once

#include <stdexcept>
#include <vector>

#include "sitmp/environment.hpp"
#include "sitmp/timed_path.hpp"

namespace sitmp {

/// Axis-aligned box of robot positions that is obstacle-free during `window`.
/// `anchor` is the scheduled time span of the seed that produced it.
struct STCuboid {
  Vec3 b_lo;
  Vec3 b_hi;
  TimeInterval window;
  TimeInterval anchor;

  Box3 box() const { return {b_lo, b_hi}; }
  bool contains(const Vec3& p, double t) const { return box().contains(p) && window.contains(t); }
};

using Corridor = std::vector<STCuboid>;

struct CorridorParams {
  double seed_spacing = 0.5;  // meters between seed points along an edge
  double step = 0.0;          // face growth step; <= 0 means grid resolution
  double max_extent = 2.0;    // per-face growth limit beyond the seed box
};

/// Raised when a corridor cannot be built for a path (the path is rejected).
struct CorridorError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Minimum Euclidean distance between the box and any occupied or
/// out-of-bounds cell, capped at `cap`.
double staticBoxClearance(const StaticGrid& grid, const Box3& box, double cap);

/// Seeds pairs of points every `seed_spacing` along each edge (plus one point
/// seed per hover), grows each seed box face by face in the order -x, +x, -y,
/// +y, -z, +z, and assigns the maximal obstacle-free window containing the
/// seed's scheduled span. Throws CorridorError if a seed box is blocked or two
/// consecutive cuboids fail to overlap.
Corridor inflateCorridor(const TimedPath& tp, const Environment& env,
                         const CorridorParams& params = {});

/// Smallest index whose window contains t. Throws QueryError if none does.
size_t activeCuboid(const Corridor& corridor, double t);

/// Cuboid for a point scheduled at `path_time` on the seed path but flown at
/// `t`: the first cuboid whose anchor holds path_time if its window holds t,
/// otherwise the index nearest to it whose window holds t. Throws QueryError
/// when no window holds t.
size_t associateCuboid(const Corridor& corridor, double path_time, double t);

}  // namespace sitmp
