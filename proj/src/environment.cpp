#include "sitmp/environment.hpp"

#include <cmath>
#include <random>

namespace sitmp {

StaticGrid::StaticGrid(Vec3 origin, double resolution, CellIndex dims)
    : origin_(std::move(origin)), resolution_(resolution), dims_(dims) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw ConfigError("grid resolution must be positive");
  for (int d : dims)
    if (d <= 0) throw ConfigError("grid dims must be positive");
  occupancy_.assign(static_cast<size_t>(dims[0]) * dims[1] * dims[2], 0);
}

bool StaticGrid::inBounds(const CellIndex& c) const {
  for (int k = 0; k < 3; ++k)
    if (c[k] < 0 || c[k] >= dims_[k]) return false;
  return true;
}

bool StaticGrid::inBounds(const Vec3& p) const { return bounds().contains(p); }

CellIndex StaticGrid::cellOf(const Vec3& p) const {
  CellIndex c;
  for (int k = 0; k < 3; ++k)
    c[k] = static_cast<int>(std::floor((p[k] - origin_[k]) / resolution_));
  return c;
}

Box3 StaticGrid::cellBox(const CellIndex& c) const {
  Vec3 lo;
  for (int k = 0; k < 3; ++k) lo[k] = origin_[k] + c[k] * resolution_;
  return {lo, lo + Vec3::Constant(resolution_)};
}

Box3 StaticGrid::bounds() const {
  Vec3 hi;
  for (int k = 0; k < 3; ++k) hi[k] = origin_[k] + dims_[k] * resolution_;
  return {origin_, hi};
}

bool StaticGrid::occupied(const CellIndex& c) const {
  if (!inBounds(c)) return true;
  return occupancy_[linear(c)] != 0;
}

void StaticGrid::setOccupied(const CellIndex& c, bool value) {
  if (!inBounds(c)) throw QueryError("cell outside grid");
  occupancy_[linear(c)] = value ? 1 : 0;
}

bool StaticGrid::blockedWithin(const Vec3& p, double radius) const {
  const CellIndex lo = cellOf(p - Vec3::Constant(radius));
  const CellIndex hi = cellOf(p + Vec3::Constant(radius));
  const double r2 = radius * radius;
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x) {
        const CellIndex c{x, y, z};
        if (!occupied(c)) continue;
        const Box3 b = cellBox(c);
        const Vec3 q = p.cwiseMax(b.lo).cwiseMin(b.hi);
        if ((q - p).squaredNorm() <= r2) return true;
      }
  return false;
}

bool StaticGrid::blockedBox(const Box3& box) const {
  const CellIndex lo = cellOf(box.lo);
  const CellIndex hi = cellOf(box.hi);
  for (int z = lo[2]; z <= hi[2]; ++z)
    for (int y = lo[1]; y <= hi[1]; ++y)
      for (int x = lo[0]; x <= hi[0]; ++x)
        if (occupied({x, y, z})) return true;
  return false;
}

size_t StaticGrid::occupiedCount() const {
  size_t n = 0;
  for (uint8_t v : occupancy_) n += v ? 1 : 0;
  return n;
}

double StaticGrid::density() const {
  return occupancy_.empty() ? 0.0
                            : static_cast<double>(occupiedCount()) / occupancy_.size();
}

Vec3 MovingObstacle::center(double t) const {
  const double tau = localTime(t);
  return {coeffs[0](tau), coeffs[1](tau), coeffs[2](tau)};
}

Vec3 obstacleCenter(const MovingObstacle& obs, double t) { return obs.center(t); }

double ellipsoidDistance(const Vec3& p, const MovingObstacle& obs, double t) {
  return (p - obs.center(t)).cwiseQuotient(obs.semi_axes).norm();
}

Environment::Environment(StaticGrid grid, std::vector<MovingObstacle> obstacles,
                         TimeInterval horizon, double robot_radius)
    : grid_(std::move(grid)),
      obstacles_(std::move(obstacles)),
      horizon_(horizon),
      robot_radius_(robot_radius) {
  if (!(robot_radius >= 0.0)) throw ConfigError("robot_radius must be >= 0");
  for (const auto& o : obstacles_) {
    if (!(o.semi_axes.array() > 0.0).all())
      throw ConfigError("obstacle semi-axes must be positive");
    if (!horizon_.contains(o.active))
      throw ConfigError("obstacle active interval must lie inside the horizon");
  }
  swept_.reserve(obstacles_.size());
  for (size_t i = 0; i < obstacles_.size(); ++i)
    swept_.push_back(centerBounds(i, horizon_.lo, horizon_.hi));
  const int n_slabs = std::max(1, static_cast<int>(std::ceil(horizon_.length() / kSlab)));
  slabs_.resize(obstacles_.size());
  for (size_t i = 0; i < obstacles_.size(); ++i)
    for (int j = 0; j < n_slabs; ++j)
      // padded against root-polishing tolerance
      slabs_[i].push_back(centerBounds(i, horizon_.lo + j * kSlab,
                                       std::min(horizon_.hi, horizon_.lo + (j + 1) * kSlab))
                              .inflated(Vec3::Constant(1e-9)));

  // Dilate occupancy (including the out-of-bounds shell) by the robot radius.
  const auto& d = grid_.dims();
  const double res = grid_.resolution();
  const double reach = robot_radius_ + clearanceSlack();
  const int k = 1 + static_cast<int>(std::floor(reach / res));
  auto gap = [&](int off) { return std::max(0, std::abs(off) - 1) * res; };
  near_static_.assign(grid_.cellCount(), 0);
  auto idx = [&](int x, int y, int z) { return (static_cast<size_t>(z) * d[1] + y) * d[0] + x; };
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        const int c[3] = {x, y, z};
        bool border = false;
        for (int a = 0; a < 3; ++a)
          border = border || c[a] * res <= reach || (d[a] - 1 - c[a]) * res <= reach;
        if (border) near_static_[idx(x, y, z)] = 1;
        if (!grid_.occupied({x, y, z})) continue;
        for (int dz = -k; dz <= k; ++dz)
          for (int dy = -k; dy <= k; ++dy)
            for (int dx = -k; dx <= k; ++dx) {
              const CellIndex n{x + dx, y + dy, z + dz};
              if (!grid_.inBounds(n)) continue;
              const double g2 = gap(dx) * gap(dx) + gap(dy) * gap(dy) + gap(dz) * gap(dz);
              if (g2 <= reach * reach) near_static_[idx(n[0], n[1], n[2])] = 1;
            }
      }
}

bool Environment::staticClear(const Vec3& p, double extra) const {
  const CellIndex c = grid_.cellOf(p);
  if (!grid_.inBounds(c)) return false;
  if (extra <= clearanceSlack()) {
    const auto& d = grid_.dims();
    if (!near_static_[(static_cast<size_t>(c[2]) * d[1] + c[1]) * d[0] + c[0]]) return true;
  }
  return !grid_.blockedWithin(p, robot_radius_ + extra);
}

Box3 Environment::centerBounds(size_t i, double a, double b) const {
  const auto& o = obstacles_[i];
  const double ta = o.localTime(horizon_.clamp(a));
  const double tb = o.localTime(horizon_.clamp(b));
  Box3 box;
  for (int k = 0; k < 3; ++k) {
    auto [lo, hi] = o.coeffs[k].range(std::min(ta, tb), std::max(ta, tb));
    box.lo[k] = lo;
    box.hi[k] = hi;
  }
  return box;
}

Box3 Environment::slabCenterBounds(size_t i, double a, double b) const {
  const auto& slabs = slabs_[i];
  const int last = static_cast<int>(slabs.size()) - 1;
  auto slabOf = [&](double t) {
    return std::clamp(static_cast<int>(std::floor((t - horizon_.lo) / kSlab)), 0, last);
  };
  const int j0 = slabOf(std::min(a, b));
  const int j1 = slabOf(std::max(a, b));
  Box3 box = slabs[j0];
  for (int j = j0 + 1; j <= j1; ++j) {
    box.lo = box.lo.cwiseMin(slabs[j].lo);
    box.hi = box.hi.cwiseMax(slabs[j].hi);
  }
  return box;
}

std::vector<TimeInterval> Environment::centerWindows(size_t i, const Box3& box,
                                                     const TimeInterval& window) const {
  std::vector<TimeInterval> out;
  const double a = std::max(window.lo, horizon_.lo);
  const double b = std::min(window.hi, horizon_.hi);
  if (a > b) return out;
  const auto& slabs = slabs_[i];
  const int last = static_cast<int>(slabs.size()) - 1;
  const int j0 = std::clamp(static_cast<int>(std::floor((a - horizon_.lo) / kSlab)), 0, last);
  const int j1 = std::clamp(static_cast<int>(std::floor((b - horizon_.lo) / kSlab)), 0, last);
  for (int j = j0; j <= j1; ++j) {
    if (!slabs[j].intersects(box)) continue;
    const double lo = std::max(a, horizon_.lo + j * kSlab);
    const double hi = j == last ? b : std::min(b, horizon_.lo + (j + 1) * kSlab);
    if (!out.empty() && out.back().hi >= lo)
      out.back().hi = hi;
    else
      out.emplace_back(lo, hi);
  }
  return out;
}

bool isPointFree(const Environment& env, const Vec3& p, double t) {
  if (env.grid().occupiedAt(p)) return false;
  const Vec3 r = Vec3::Constant(env.robotRadius());
  for (const auto& o : env.obstacles()) {
    const Vec3 axes = o.semi_axes + r;
    if ((p - o.center(t)).cwiseQuotient(axes).squaredNorm() <= 1.0) return false;
  }
  return true;
}

DensityClass parseDensityClass(const std::string& name) {
  if (name == "sparse") return DensityClass::Sparse;
  if (name == "moderate") return DensityClass::Moderate;
  if (name == "dense") return DensityClass::Dense;
  throw ConfigError("unknown density class '" + name + "' (expected sparse|moderate|dense)");
}

std::string toString(DensityClass c) {
  switch (c) {
    case DensityClass::Sparse: return "sparse";
    case DensityClass::Moderate: return "moderate";
    case DensityClass::Dense: return "dense";
  }
  return "sparse";
}

std::pair<double, double> EnvGenParams::densityRange() const {
  switch (density) {
    case DensityClass::Sparse: return {0.0, 0.01};
    case DensityClass::Moderate: return {0.05, 0.1};
    case DensityClass::Dense: return {0.15, 0.2};
  }
  return {0.0, 0.01};
}

std::pair<int, int> EnvGenParams::obstacleCountRange() const {
  switch (density) {
    case DensityClass::Sparse: return {0, 20};
    case DensityClass::Moderate: return {20, 40};
    case DensityClass::Dense: return {40, 60};
  }
  return {0, 20};
}

namespace {

struct Footprint {
  bool cylinder = false;
  Vec3 center = Vec3::Zero();  // z unused
  double half_x = 0.0;
  double half_y = 0.0;
  double height = 0.0;
};

// Cells whose centers fall inside the vertical primitive.
std::vector<size_t> voxelize(const StaticGrid& grid, const Footprint& f) {
  std::vector<size_t> cells;
  const auto& dims = grid.dims();
  const double res = grid.resolution();
  const Vec3& o = grid.origin();
  for (int z = 0; z < dims[2]; ++z) {
    const double cz = o.z() + (z + 0.5) * res;
    if (cz > o.z() + f.height) break;
    for (int y = 0; y < dims[1]; ++y) {
      const double cy = o.y() + (y + 0.5) * res - f.center.y();
      if (std::abs(cy) > f.half_y) continue;
      for (int x = 0; x < dims[0]; ++x) {
        const double cx = o.x() + (x + 0.5) * res - f.center.x();
        if (std::abs(cx) > f.half_x) continue;
        if (f.cylinder && cx * cx + cy * cy > f.half_x * f.half_x) continue;
        cells.push_back((static_cast<size_t>(z) * dims[1] + y) * dims[0] + x);
      }
    }
  }
  return cells;
}

// Cubic Hermite coefficients from (a, va) at 0 to (b, vb) at T.
std::vector<double> hermite(double a, double va, double b, double vb, double T) {
  return {a, va, (3.0 * (b - a) - (2.0 * va + vb) * T) / (T * T),
          (2.0 * (a - b) + (va + vb) * T) / (T * T * T)};
}

}  // namespace

Environment generateRandomEnv(const EnvGenParams& params, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };

  CellIndex dims;
  for (int k = 0; k < 3; ++k)
    dims[k] = static_cast<int>(std::lround(params.workspace[k] / params.resolution));
  StaticGrid grid(Vec3::Zero(), params.resolution, dims);
  const Box3 ws = grid.bounds();

  // Static obstacles: vertical boxes and cylinders until the target density.
  const auto [dlo, dhi] = params.densityRange();
  const double target = uniform(dlo, dhi);
  const size_t total = grid.cellCount();
  std::vector<uint16_t> count(total, 0);
  size_t occupied = 0;
  int rejections = 0;
  while (static_cast<double>(occupied) / total < target && rejections < 200) {
    Footprint f;
    f.cylinder = uniform(0.0, 1.0) < 0.5;
    f.center = Vec3(uniform(ws.lo.x(), ws.hi.x()), uniform(ws.lo.y(), ws.hi.y()), 0.0);
    f.half_x = 0.5 * uniform(params.min_footprint, params.max_footprint);
    f.half_y = f.cylinder ? f.half_x : 0.5 * uniform(params.min_footprint, params.max_footprint);
    f.height = uniform(std::min(params.min_height, ws.hi.z()), ws.hi.z());
    const auto cells = voxelize(grid, f);
    size_t added = 0;
    for (size_t c : cells) added += count[c] == 0 ? 1 : 0;
    if (static_cast<double>(occupied + added) / total > dhi) {
      ++rejections;
      continue;
    }
    for (size_t c : cells) ++count[c];
    occupied += added;
  }
  for (int z = 0; z < dims[2]; ++z)
    for (int y = 0; y < dims[1]; ++y)
      for (int x = 0; x < dims[0]; ++x)
        if (count[(static_cast<size_t>(z) * dims[1] + y) * dims[0] + x])
          grid.setOccupied({x, y, z}, true);

  // Moving ellipsoids with cubic trajectories over the whole horizon.
  const auto [nlo, nhi] = params.obstacleCountRange();
  const int n = std::uniform_int_distribution<int>(nlo, nhi)(rng);
  const double T = params.horizon.length();
  std::vector<MovingObstacle> obstacles;
  obstacles.reserve(n);
  for (int i = 0; i < n; ++i) {
    MovingObstacle o;
    for (int k = 0; k < 3; ++k) o.semi_axes[k] = uniform(params.min_semi_axis, params.max_semi_axis);
    o.active = params.horizon;
    for (int k = 0; k < 3; ++k) {
      const double lo = ws.lo[k] + o.semi_axes[k];
      const double hi = ws.hi[k] - o.semi_axes[k];
      const double vcap = 0.5 * params.v_obs_max;
      std::vector<double> c;
      for (int attempt = 0;; ++attempt) {
        const double a = uniform(lo, hi);
        const double b = uniform(lo, hi);
        const double va = attempt < 50 ? uniform(-vcap, vcap) : 0.0;
        const double vb = attempt < 50 ? uniform(-vcap, vcap) : 0.0;
        c = hermite(a, va, b, vb, T);
        const Polynomial p(c);
        const auto [plo, phi] = p.range(0.0, T);
        const auto [vlo, vhi] = p.derivative().range(0.0, T);
        const bool inside = plo >= lo && phi <= hi;
        const bool slow = std::max(std::abs(vlo), std::abs(vhi)) <= params.v_obs_max;
        if ((inside && slow) || attempt >= 100) break;
      }
      o.coeffs[k] = Polynomial(c);
    }
    obstacles.push_back(std::move(o));
  }
  return Environment(std::move(grid), std::move(obstacles), params.horizon, params.robot_radius);
}

}  // namespace sitmp
