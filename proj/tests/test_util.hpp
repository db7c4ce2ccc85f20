#pragma once

#include <random>
#include <vector>

#include "sitmp/environment.hpp"

namespace sitmp::testing {

inline StaticGrid emptyGrid(CellIndex dims, double res = 0.5, Vec3 origin = Vec3::Zero()) {
  return StaticGrid(origin, res, dims);
}

/// Obstacle moving on a straight line c0 + v * (t - active.lo).
inline MovingObstacle linearObstacle(const Vec3& c0, const Vec3& v, const Vec3& semi,
                                     TimeInterval active) {
  MovingObstacle o;
  o.semi_axes = semi;
  o.active = active;
  for (int k = 0; k < 3; ++k) o.coeffs[k] = Polynomial({c0[k], v[k]});
  return o;
}

inline MovingObstacle fixedObstacle(const Vec3& c, const Vec3& semi, TimeInterval active) {
  return linearObstacle(c, Vec3::Zero(), semi, active);
}

inline Environment openWorld(CellIndex dims, double res, std::vector<MovingObstacle> obs,
                             TimeInterval horizon, double radius) {
  return Environment(emptyGrid(dims, res), std::move(obs), horizon, radius);
}

inline double uniform(std::mt19937_64& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

inline Vec3 uniformVec(std::mt19937_64& rng, const Vec3& lo, const Vec3& hi) {
  return {uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()), uniform(rng, lo.z(), hi.z())};
}

}  // namespace sitmp::testing
