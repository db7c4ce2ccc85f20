#include "sitmp/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sitmp {

SafeIntervalSet::SafeIntervalSet(std::vector<TimeInterval> intervals)
    : intervals_(std::move(intervals)) {
  for (size_t i = 0; i < intervals_.size(); ++i) {
    if (!(intervals_[i].length() > 0.0))
      throw std::invalid_argument("safe interval must have positive length");
    if (i > 0 && !(intervals_[i].lo > intervals_[i - 1].hi))
      throw std::invalid_argument("safe intervals must be sorted and disjoint");
  }
}

std::optional<size_t> SafeIntervalSet::find(double t) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](double v, const TimeInterval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return std::nullopt;
  --it;
  if (it->contains(t)) return static_cast<size_t>(it - intervals_.begin());
  return std::nullopt;
}

std::vector<TimeInterval> mergeIntervals(std::vector<TimeInterval> v) {
  std::sort(v.begin(), v.end(), [](const TimeInterval& a, const TimeInterval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<TimeInterval> out;
  for (const auto& iv : v) {
    if (!out.empty() && iv.lo <= out.back().hi)
      out.back().hi = std::max(out.back().hi, iv.hi);
    else
      out.push_back(iv);
  }
  return out;
}

std::vector<TimeInterval> complementIn(const std::vector<TimeInterval>& blocked,
                                       const TimeInterval& horizon) {
  std::vector<TimeInterval> out;
  double cursor = horizon.lo;
  for (const auto& b : mergeIntervals(blocked)) {
    if (b.hi < horizon.lo) continue;
    if (b.lo > horizon.hi) break;
    if (b.lo >= cursor) out.emplace_back(cursor, b.lo);
    cursor = std::max(cursor, b.hi);
  }
  if (cursor <= horizon.hi) out.emplace_back(cursor, horizon.hi);
  return out;
}

SafeIntervalSet filterLongerThan(const std::vector<TimeInterval>& v, double t_min) {
  std::vector<TimeInterval> keep;
  for (const auto& iv : v)
    if (iv.length() > t_min && iv.length() > 0.0) keep.push_back(iv);
  return SafeIntervalSet(std::move(keep));
}

std::vector<TimeInterval> intersect(const SafeIntervalSet& a, const SafeIntervalSet& b) {
  std::vector<TimeInterval> out;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (hi > lo) out.emplace_back(lo, hi);
    if (a[i].hi < b[j].hi)
      ++i;
    else
      ++j;
  }
  return out;
}

InflatedCuboid edgeCuboid(const Vec3& p1, const Vec3& p2, const Vec3& margin) {
  if (!(margin.array() > 0.0).all())
    throw std::invalid_argument("edgeCuboid: margin must be positive on every axis");
  return {p1.cwiseMin(p2) - margin, p1.cwiseMax(p2) + margin};
}

namespace {

// Inside-windows of a polynomial center over local times [ta, tb], shifted by
// `offset` to absolute time.
void polyInside(const Box3& box, const MovingObstacle& obs, double ta, double tb, double offset,
                std::vector<TimeInterval>& out) {
  std::vector<double> cuts{ta, tb};
  for (int k = 0; k < 3; ++k) {
    const Polynomial& p = obs.coeffs[k];
    if (p.degree() == 0) continue;
    for (double bound : {box.lo[k], box.hi[k]})
      for (double r : realRoots(p - bound, ta, tb)) cuts.push_back(r);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto inside = [&](double tau) {
    for (int k = 0; k < 3; ++k) {
      const double v = obs.coeffs[k](tau);
      if (v < box.lo[k] || v > box.hi[k]) return false;
    }
    return true;
  };

  if (cuts.size() == 1) {
    if (inside(cuts[0])) out.emplace_back(cuts[0] + offset, cuts[0] + offset);
    return;
  }
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!inside(0.5 * (cuts[i] + cuts[i + 1]))) continue;
    const double lo = cuts[i] + offset;
    const double hi = cuts[i + 1] + offset;
    if (!out.empty() && out.back().hi >= lo)
      out.back().hi = hi;
    else
      out.emplace_back(lo, hi);
  }
}

}  // namespace

std::vector<TimeInterval> cuboidCollisionIntervals(const Box3& box, const MovingObstacle& obs,
                                                   const TimeInterval& horizon) {
  std::vector<TimeInterval> out;
  const TimeInterval& act = obs.active;
  // Parked before the active window.
  if (horizon.lo < act.lo) {
    const double hi = std::min(act.lo, horizon.hi);
    if (box.contains(obs.center(act.lo))) out.emplace_back(horizon.lo, hi);
  }
  const double a = std::max(horizon.lo, act.lo);
  const double b = std::min(horizon.hi, act.hi);
  if (a <= b) polyInside(box, obs, a - act.lo, b - act.lo, act.lo, out);
  // Parked after.
  if (horizon.hi > act.hi) {
    const double lo = std::max(act.hi, horizon.lo);
    if (box.contains(obs.center(act.hi))) out.emplace_back(lo, horizon.hi);
  }
  return mergeIntervals(std::move(out));
}

std::vector<TimeInterval> boxCollisionIntervals(const Environment& env, const Box3& box,
                                                const TimeInterval& window) {
  std::vector<TimeInterval> all;
  const Vec3 r = Vec3::Constant(env.robotRadius());
  const auto& obstacles = env.obstacles();
  for (size_t i = 0; i < obstacles.size(); ++i) {
    const Box3 inflated = box.inflated(r + obstacles[i].semi_axes);
    if (!inflated.intersects(env.sweptCenterBounds(i))) continue;
    for (const TimeInterval& w : env.centerWindows(i, inflated, window)) {
      auto ci = cuboidCollisionIntervals(inflated, obstacles[i], w);
      all.insert(all.end(), ci.begin(), ci.end());
    }
  }
  return mergeIntervals(std::move(all));
}

std::vector<Box3> segmentPieces(const Vec3& p1, const Vec3& p2, double max_piece) {
  if (!(max_piece > 0.0)) throw std::invalid_argument("max_piece must be positive");
  const int n = std::max(1, static_cast<int>(std::ceil((p2 - p1).norm() / max_piece - 1e-9)));
  std::vector<Box3> out;
  for (int i = 0; i < n; ++i) {
    const Vec3 a = p1 + (p2 - p1) * (static_cast<double>(i) / n);
    const Vec3 b = i + 1 == n ? p2 : Vec3(p1 + (p2 - p1) * (static_cast<double>(i + 1) / n));
    out.push_back({a.cwiseMin(b), a.cwiseMax(b)});
  }
  return out;
}

std::vector<TimeInterval> segmentCollisionIntervals(const Environment& env, const Vec3& p1,
                                                    const Vec3& p2, const TimeInterval& window,
                                                    double max_piece) {
  std::vector<TimeInterval> all;
  for (const Box3& b : segmentPieces(p1, p2, max_piece))
    for (const auto& c : boxCollisionIntervals(env, b, window)) all.push_back(c);
  return mergeIntervals(std::move(all));
}

bool edgeStaticFree(const Environment& env, const Vec3& p1, const Vec3& p2) {
  const double step = env.grid().resolution() / 4.0;
  const double len = (p2 - p1).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
  // Every point of the segment is within half a step of some sample.
  const double extra = 0.5 * len / n;
  for (int i = 0; i <= n; ++i) {
    const Vec3 q = p1 + (p2 - p1) * (static_cast<double>(i) / n);
    if (!env.staticClear(q, extra)) return false;
  }
  return true;
}

SafeIntervalSet edgeSafeIntervals(const Environment& env, const Vec3& p1, const Vec3& p2,
                                  double t_min) {
  if (!edgeStaticFree(env, p1, p2)) return {};
  const auto blocked = segmentCollisionIntervals(env, p1, p2, env.horizon());
  return filterLongerThan(complementIn(blocked, env.horizon()), t_min);
}

}  // namespace sitmp
