#include "sitmp/utvd.hpp"

#include <algorithm>
#include <stdexcept>

namespace sitmp {

bool checkEquiv(const TimedPath& a, const TimedPath& b, const Environment& env, int samples) {
  if (samples < 2) throw std::invalid_argument("checkEquiv: samples must be >= 2");
  if (a.vertices.empty() || b.vertices.empty())
    throw std::invalid_argument("checkEquiv: empty path");
  if (!(a.duration() > 0.0) || !(b.duration() > 0.0))
    throw std::invalid_argument("checkEquiv: zero-duration path");
  constexpr double kTol = 1e-9;
  if ((a.vertices.front() - b.vertices.front()).norm() > kTol ||
      (a.vertices.back() - b.vertices.back()).norm() > kTol)
    throw std::invalid_argument("checkEquiv: paths must share start and goal");

  for (int k = 0; k < samples; ++k) {
    const double s = static_cast<double>(k) / (samples - 1);
    const double ta = a.start() + s * a.duration();
    const double tb = b.start() + s * b.duration();
    const Vec3 pa = a.position(ta);
    const Vec3 pb = b.position(tb);
    if (!edgeStaticFree(env, pa, pb)) return false;
    const double wlo = std::min(ta, tb);
    const double whi = std::max(ta, tb);
    // Maximal (open) collision windows; any overlap with the closed window fails.
    for (const auto& c : segmentCollisionIntervals(env, pa, pb, env.horizon()))
      if (c.lo < whi && c.hi > wlo) return false;
  }
  return true;
}

}  // namespace sitmp
