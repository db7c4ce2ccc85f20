#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sitmp/polynomial.hpp"
#include "sitmp/types.hpp"

namespace sitmp {

using CellIndex = std::array<int, 3>;

/// Axis-aligned box in meters.
struct Box3 {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool intersects(const Box3& o) const {
    return (lo.array() <= o.hi.array()).all() && (o.lo.array() <= hi.array()).all();
  }
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  Box3 inflated(const Vec3& m) const { return {lo - m, hi + m}; }
};

/// Static occupancy voxels. Cells outside the grid count as occupied.
class StaticGrid {
 public:
  StaticGrid() = default;
  StaticGrid(Vec3 origin, double resolution, CellIndex dims);

  const Vec3& origin() const { return origin_; }
  double resolution() const { return resolution_; }
  const CellIndex& dims() const { return dims_; }
  size_t cellCount() const { return occupancy_.size(); }

  bool inBounds(const CellIndex& c) const;
  bool inBounds(const Vec3& p) const;
  CellIndex cellOf(const Vec3& p) const;
  Box3 cellBox(const CellIndex& c) const;
  Box3 bounds() const;

  bool occupied(const CellIndex& c) const;
  bool occupiedAt(const Vec3& p) const { return occupied(cellOf(p)); }
  void setOccupied(const CellIndex& c, bool value);

  /// Any occupied (or out-of-bounds) cell within distance `radius` of p.
  /// A cell exactly at distance `radius` counts as blocking.
  bool blockedWithin(const Vec3& p, double radius) const;
  /// Any occupied (or out-of-bounds) cell intersecting the closed box.
  bool blockedBox(const Box3& box) const;

  double density() const;
  size_t occupiedCount() const;

  const std::vector<uint8_t>& raw() const { return occupancy_; }

  friend bool operator==(const StaticGrid&, const StaticGrid&) = default;

 private:
  size_t linear(const CellIndex& c) const {
    return (static_cast<size_t>(c[2]) * dims_[1] + c[1]) * dims_[0] + c[0];
  }

  Vec3 origin_ = Vec3::Zero();
  double resolution_ = 1.0;
  CellIndex dims_{0, 0, 0};
  std::vector<uint8_t> occupancy_;
};

/// Ellipsoid whose center follows one polynomial per axis. Polynomials are in
/// shifted time tau = t - active.lo; outside `active` the obstacle is parked
/// at the nearest endpoint position.
struct MovingObstacle {
  Vec3 semi_axes = Vec3::Ones();
  std::array<Polynomial, 3> coeffs;
  TimeInterval active;

  Vec3 center(double t) const;
  /// Polynomial time (clamped into the active window).
  double localTime(double t) const { return active.clamp(t) - active.lo; }

  friend bool operator==(const MovingObstacle&, const MovingObstacle&) = default;
};

Vec3 obstacleCenter(const MovingObstacle& obs, double t);

/// ||E^-1 (p - c(t))|| with E = diag(semi_axes); 1 is the surface.
double ellipsoidDistance(const Vec3& p, const MovingObstacle& obs, double t);

class Environment {
 public:
  Environment() = default;
  Environment(StaticGrid grid, std::vector<MovingObstacle> obstacles, TimeInterval horizon,
              double robot_radius);

  const StaticGrid& grid() const { return grid_; }
  const std::vector<MovingObstacle>& obstacles() const { return obstacles_; }
  const TimeInterval& horizon() const { return horizon_; }
  double robotRadius() const { return robot_radius_; }

  /// Bounding box of each obstacle's center over the horizon.
  const Box3& sweptCenterBounds(size_t i) const { return swept_[i]; }
  /// Bounding box of the center over [a, b] (clamped to the horizon).
  Box3 centerBounds(size_t i, double a, double b) const;
  /// Sub-windows of `window` outside which obstacle i's center provably stays
  /// out of `box`, from precomputed bounds over fixed time slabs.
  /// Conservative version of centerBounds() from the precomputed slabs.
  Box3 slabCenterBounds(size_t i, double a, double b) const;
  std::vector<TimeInterval> centerWindows(size_t i, const Box3& box,
                                          const TimeInterval& window) const;

  /// Static test with the robot treated as a ball of robotRadius() + extra.
  /// Uses a precomputed dilation of the grid as a fast path in open space.
  bool staticClear(const Vec3& p, double extra = 0.0) const;
  /// Slack the fast path in staticClear() tolerates.
  double clearanceSlack() const { return grid_.resolution() / 8.0; }

  friend bool operator==(const Environment& a, const Environment& b) {
    return a.grid_ == b.grid_ && a.obstacles_ == b.obstacles_ && a.horizon_ == b.horizon_ &&
           a.robot_radius_ == b.robot_radius_;
  }

 private:
  StaticGrid grid_;
  std::vector<MovingObstacle> obstacles_;
  TimeInterval horizon_;
  double robot_radius_ = 0.0;
  std::vector<Box3> swept_;
  static constexpr double kSlab = 1.0;  // seconds
  std::vector<std::vector<Box3>> slabs_;  // per obstacle, per slab
  // Cells with an occupied cell within robotRadius() + clearanceSlack().
  std::vector<uint8_t> near_static_;
};

/// Point-in-time freeness: the grid cell holding p is free and p is strictly
/// outside every obstacle ellipsoid enlarged by the robot radius on each axis.
bool isPointFree(const Environment& env, const Vec3& p, double t);

enum class DensityClass { Sparse, Moderate, Dense };

DensityClass parseDensityClass(const std::string& name);
std::string toString(DensityClass c);

struct EnvGenParams {
  DensityClass density = DensityClass::Sparse;
  Vec3 workspace{20.0, 20.0, 5.0};
  double resolution = 0.2;
  TimeInterval horizon{0.0, 60.0};
  double robot_radius = 0.15;
  double v_obs_max = 2.0;
  double min_semi_axis = 0.15;
  double max_semi_axis = 0.4;
  double min_footprint = 0.4;
  double max_footprint = 1.2;
  double min_height = 2.5;

  /// Density and obstacle-count ranges for the class.
  std::pair<double, double> densityRange() const;
  std::pair<int, int> obstacleCountRange() const;
};

Environment generateRandomEnv(const EnvGenParams& params, uint64_t seed);

}  // namespace sitmp
