#include "sitmp/corridor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sitmp/intervals.hpp"

namespace sitmp {

namespace {

constexpr double kGap = 1e-9;

CellIndex clampCell(const StaticGrid& g, const Vec3& p) {
  CellIndex c = g.cellOf(p);
  for (int k = 0; k < 3; ++k) c[k] = std::clamp(c[k], 0, g.dims()[k] - 1);
  return c;
}

double boxGap(const Box3& a, const Box3& b, int k) {
  return std::max({0.0, b.lo[k] - a.hi[k], a.lo[k] - b.hi[k]});
}

// Furthest coordinate face (axis, dir) of `box` may reach, at most `reach`
// beyond its current position, keeping every occupied cell farther than r.
double faceLimit(const StaticGrid& grid, const Box3& box, int axis, int dir, double reach,
                 double r) {
  const Box3 bounds = grid.bounds();
  double limit = dir > 0 ? std::min(box.hi[axis] + reach, bounds.hi[axis] - r - kGap)
                         : std::max(box.lo[axis] - reach, bounds.lo[axis] + r + kGap);
  Box3 region = box.inflated(Vec3::Constant(r));
  if (dir > 0)
    region.hi[axis] = box.hi[axis] + reach + r;
  else
    region.lo[axis] = box.lo[axis] - reach - r;
  const CellIndex c0 = clampCell(grid, region.lo);
  const CellIndex c1 = clampCell(grid, region.hi);
  for (int z = c0[2]; z <= c1[2]; ++z)
    for (int y = c0[1]; y <= c1[1]; ++y)
      for (int x = c0[0]; x <= c1[0]; ++x) {
        const CellIndex c{x, y, z};
        if (!grid.occupied(c)) continue;
        const Box3 cb = grid.cellBox(c);
        double lateral = 0.0;
        for (int k = 0; k < 3; ++k)
          if (k != axis) lateral += std::pow(boxGap(box, cb, k), 2);
        if (lateral > r * r) continue;
        const double along = std::sqrt(r * r - lateral) + kGap;
        if (dir > 0 && cb.hi[axis] > box.hi[axis])
          limit = std::min(limit, cb.lo[axis] - along);
        else if (dir < 0 && cb.lo[axis] < box.lo[axis])
          limit = std::max(limit, cb.hi[axis] + along);
      }
  return limit;
}

bool dynamicFree(const Environment& env, const std::vector<size_t>& relevant, const Box3& box,
                 const TimeInterval& span) {
  for (size_t i : relevant) {
    const MovingObstacle& o = env.obstacles()[i];
    const Box3 inflated = box.inflated(o.semi_axes + Vec3::Constant(env.robotRadius()));
    if (!cuboidCollisionIntervals(inflated, o, span).empty()) return false;
  }
  return true;
}

struct Seed {
  Vec3 a;
  Vec3 b;
  TimeInterval anchor;
};

class Builder {
 public:
  Builder(const TimedPath& tp, const Environment& env, const CorridorParams& params)
      : tp_(tp), env_(env), params_(params) {
    step_ = params.step > 0.0 ? params.step : env.grid().resolution();
  }

  Corridor run() {
    const size_t m = tp_.edgeCount();
    for (size_t i = 0; i < m; ++i) {
      if (tp_.depart[i] > tp_.arrive[i])
        addSeed({tp_.vertices[i], tp_.vertices[i], {tp_.arrive[i], tp_.depart[i]}}, 0);
      seedEdge(i);
    }
    for (size_t i = 0; i + 1 < out_.size(); ++i) {
      const STCuboid& a = out_[i];
      const STCuboid& b = out_[i + 1];
      if (!a.box().intersects(b.box()) ||
          std::max(a.window.lo, b.window.lo) > std::min(a.window.hi, b.window.hi))
        throw CorridorError("cuboids " + std::to_string(i) + " and " + std::to_string(i + 1) +
                            " do not overlap");
    }
    return out_;
  }

 private:
  void seedEdge(size_t i) {
    const Vec3& p = tp_.vertices[i];
    const Vec3 delta = tp_.vertices[i + 1] - p;
    const double len = delta.norm();
    const double t_dep = tp_.depart[i];
    const double t_arr = tp_.arrive[i + 1];
    if (len <= 0.0) {
      addSeed({p, p, {t_dep, t_arr}}, 0);
      return;
    }
    const double scale = (t_arr - t_dep) / minTravelTime(len, tp_.bounds);
    const int k = std::max(1, static_cast<int>(std::ceil(len / params_.seed_spacing - 1e-9)));
    auto timeAt = [&](double s) {
      return std::min(t_arr, t_dep + trapezoidTimeAt(len, tp_.bounds, s) * scale);
    };
    for (int j = 0; j < k; ++j) {
      const double s0 = len * j / k;
      const double s1 = len * (j + 1) / k;
      addSeed({p + delta * (s0 / len), p + delta * (s1 / len), {timeAt(s0), timeAt(s1)}}, 0);
    }
  }

  void addSeed(const Seed& seed, int depth) {
    const double r = env_.robotRadius();
    Box3 box{seed.a.cwiseMin(seed.b), seed.a.cwiseMax(seed.b)};
    if (staticBoxClearance(env_.grid(), box, r + 1.0) <= r) {
      // The bounding box of a diagonal seed can clip a corner the segment
      // itself clears; split until it does not.
      if (depth >= 6 || (seed.a - seed.b).norm() < 1e-6)
        throw CorridorError("seed box is statically blocked");
      // Split in time; the spatial midpoint is not where the path is then.
      const double tm = 0.5 * (seed.anchor.lo + seed.anchor.hi);
      const Vec3 mid = tp_.position(tm);
      addSeed({seed.a, mid, {seed.anchor.lo, tm}}, depth + 1);
      addSeed({mid, seed.b, {tm, seed.anchor.hi}}, depth + 1);
      return;
    }

    const double ext = params_.max_extent;
    const Box3 reach = box.inflated(Vec3::Constant(ext));
    std::vector<size_t> relevant;
    for (size_t i = 0; i < env_.obstacles().size(); ++i) {
      const Vec3 m = env_.obstacles()[i].semi_axes + Vec3::Constant(r);
      if (env_.centerBounds(i, seed.anchor.lo, seed.anchor.hi).intersects(reach.inflated(m)))
        relevant.push_back(i);
    }
    if (!dynamicFree(env_, relevant, box, seed.anchor))
      throw CorridorError("seed box collides with a moving obstacle during its span");

    const Box3 seed_box = box;
    bool active[6] = {true, true, true, true, true, true};
    bool any = true;
    while (any) {
      any = false;
      for (int f = 0; f < 6; ++f) {
        if (!active[f]) continue;
        const int axis = f / 2;
        const int dir = f % 2 == 0 ? -1 : 1;
        const double cur = dir > 0 ? box.hi[axis] : box.lo[axis];
        const double cap = dir > 0 ? seed_box.hi[axis] + ext : seed_box.lo[axis] - ext;
        const double room = std::abs(cap - cur);
        if (room <= 0.0) {
          active[f] = false;
          continue;
        }
        double next = faceLimit(env_.grid(), box, axis, dir, std::min(step_, room), r);
        if (dir > 0 ? next <= cur : next >= cur) {
          active[f] = false;
          continue;
        }
        Box3 cand = box;
        (dir > 0 ? cand.hi : cand.lo)[axis] = next;
        if (!dynamicFree(env_, relevant, cand, seed.anchor)) {
          active[f] = false;
          continue;
        }
        box = cand;
        // A clipped step means a static cell is in the way.
        if (std::abs(next - cur) < std::min(step_, room) - 1e-12) active[f] = false;
        any = true;
      }
    }

    std::vector<TimeInterval> blocked;
    for (size_t i = 0; i < env_.obstacles().size(); ++i) {
      const MovingObstacle& o = env_.obstacles()[i];
      const Box3 inflated = box.inflated(o.semi_axes + Vec3::Constant(r));
      if (!env_.sweptCenterBounds(i).intersects(inflated)) continue;
      for (const auto& c : cuboidCollisionIntervals(inflated, o, env_.horizon()))
        blocked.push_back(c);
    }
    const auto free = complementIn(mergeIntervals(std::move(blocked)), env_.horizon());
    for (const auto& w : free) {
      if (w.lo <= seed.anchor.lo + kGap && w.hi >= seed.anchor.hi - kGap && w.length() > 0.0) {
        out_.push_back({box.lo, box.hi, w, seed.anchor});
        return;
      }
    }
    throw CorridorError("no obstacle-free window contains the seed span");
  }

  const TimedPath& tp_;
  const Environment& env_;
  CorridorParams params_;
  double step_ = 0.0;
  Corridor out_;
};

}  // namespace

double staticBoxClearance(const StaticGrid& grid, const Box3& box, double cap) {
  const Box3 bounds = grid.bounds();
  double best = cap;
  for (int k = 0; k < 3; ++k)
    best = std::min({best, std::max(0.0, box.lo[k] - bounds.lo[k]),
                     std::max(0.0, bounds.hi[k] - box.hi[k])});
  const Box3 region = box.inflated(Vec3::Constant(cap));
  const CellIndex c0 = clampCell(grid, region.lo);
  const CellIndex c1 = clampCell(grid, region.hi);
  for (int z = c0[2]; z <= c1[2]; ++z)
    for (int y = c0[1]; y <= c1[1]; ++y)
      for (int x = c0[0]; x <= c1[0]; ++x) {
        const CellIndex c{x, y, z};
        if (!grid.occupied(c)) continue;
        const Box3 cb = grid.cellBox(c);
        double d2 = 0.0;
        for (int k = 0; k < 3; ++k) d2 += std::pow(boxGap(box, cb, k), 2);
        best = std::min(best, std::sqrt(d2));
      }
  return best;
}

Corridor inflateCorridor(const TimedPath& tp, const Environment& env,
                         const CorridorParams& params) {
  if (tp.edgeCount() == 0) throw CorridorError("timed path has no edges");
  if (!(params.seed_spacing > 0.0) || !(params.max_extent >= 0.0))
    throw ConfigError("corridor parameters must be positive");
  return Builder(tp, env, params).run();
}

size_t activeCuboid(const Corridor& corridor, double t) {
  for (size_t i = 0; i < corridor.size(); ++i)
    if (corridor[i].window.contains(t)) return i;
  throw QueryError("no corridor window contains t = " + std::to_string(t));
}

size_t associateCuboid(const Corridor& corridor, double path_time, double t) {
  if (corridor.empty()) throw QueryError("empty corridor");
  size_t pref = corridor.size() - 1;
  if (path_time <= corridor.front().anchor.lo) pref = 0;
  for (size_t i = 0; i < corridor.size(); ++i)
    if (corridor[i].anchor.contains(path_time)) {
      pref = i;
      break;
    }
  const long n = static_cast<long>(corridor.size());
  for (long d = 0; d < n; ++d) {
    for (long i : {static_cast<long>(pref) - d, static_cast<long>(pref) + d}) {
      if (i < 0 || i >= n) continue;
      if (corridor[i].window.contains(t)) return static_cast<size_t>(i);
    }
  }
  throw QueryError("no corridor window contains t = " + std::to_string(t));
}

}  // namespace sitmp
