#include "sitmp/timed_path.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sitmp {

double TimedPath::length() const {
  double len = 0.0;
  for (size_t i = 0; i + 1 < vertices.size(); ++i) len += (vertices[i + 1] - vertices[i]).norm();
  return len;
}

Vec3 TimedPath::position(double t) const {
  if (vertices.empty()) throw std::logic_error("empty timed path");
  if (t <= arrive.front()) return vertices.front();
  for (size_t i = 0; i + 1 < vertices.size(); ++i) {
    if (t <= depart[i]) return vertices[i];
    if (t < arrive[i + 1]) {
      const Vec3 delta = vertices[i + 1] - vertices[i];
      const double len = delta.norm();
      if (len <= 0.0) return vertices[i];
      // Stretch the optimal profile over the scheduled traversal time.
      const double scale = minTravelTime(len, bounds) / (arrive[i + 1] - depart[i]);
      const double s = trapezoidPosition(len, bounds, (t - depart[i]) * scale);
      return vertices[i] + delta * (s / len);
    }
  }
  return vertices.back();
}

void TimedPath::validate() const {
  const size_t n = vertices.size();
  if (n < 2) throw std::logic_error("timed path needs at least two vertices");
  if (arrive.size() != n || depart.size() != n || chosen.size() != n - 1)
    throw std::logic_error("timed path arrays have inconsistent sizes");
  constexpr double eps = 1e-9;
  for (size_t i = 0; i < n; ++i)
    if (depart[i] < arrive[i] - eps)
      throw std::logic_error("departure before arrival at vertex " + std::to_string(i));
  for (size_t i = 0; i + 1 < n; ++i) {
    const double len = (vertices[i + 1] - vertices[i]).norm();
    if (arrive[i + 1] - depart[i] < minTravelTime(len, bounds) - eps)
      throw std::logic_error("edge " + std::to_string(i) + " flown faster than its minimum time");
    if (depart[i] < chosen[i].lo - eps || arrive[i + 1] > chosen[i].hi + eps)
      throw std::logic_error("edge " + std::to_string(i) + " leaves its chosen interval");
    // Hovering at vertex i+1 must stay inside the incoming interval.
    if (i + 2 < n && depart[i + 1] > chosen[i].hi + eps)
      throw std::logic_error("hover at vertex " + std::to_string(i + 1) + " is not covered");
  }
}

bool ArrivalLayer::feasible() const {
  for (double a : arrival)
    if (a < kInfinity) return true;
  return false;
}

ArrivalLayer firstArrivalLayer(const SafeIntervalSet& si, double duration, double t_start,
                               double hold_until) {
  ArrivalLayer l;
  l.arrival.assign(si.size(), kInfinity);
  l.departure.assign(si.size(), kInfinity);
  l.parent.assign(si.size(), -1);
  const double hold = std::max(t_start, hold_until);
  for (size_t j = 0; j < si.size(); ++j) {
    const TimeInterval& iv = si[j];
    if (iv.hi < t_start) continue;
    if (iv.lo > hold) break;
    const double td = std::max(t_start, iv.lo);
    if (td + duration <= iv.hi) {
      l.arrival[j] = td + duration;
      l.departure[j] = td;
    }
  }
  return l;
}

ArrivalLayer nextArrivalLayer(const ArrivalLayer& prev, const SafeIntervalSet& prev_si,
                              const SafeIntervalSet& si, double duration) {
  ArrivalLayer l;
  l.arrival.assign(si.size(), kInfinity);
  l.departure.assign(si.size(), kInfinity);
  l.parent.assign(si.size(), -1);
  for (size_t jp = 0; jp < prev.arrival.size(); ++jp) {
    const double a = prev.arrival[jp];
    if (a == kInfinity) continue;
    const double wait_end = prev_si[jp].hi;
    for (size_t j = 0; j < si.size(); ++j) {
      const TimeInterval& iv = si[j];
      if (iv.hi < a) continue;
      if (iv.lo > wait_end) break;
      const double td = std::max(a, iv.lo);
      const double arr = td + duration;
      if (arr > iv.hi) continue;
      if (arr < l.arrival[j]) {
        l.arrival[j] = arr;
        l.departure[j] = td;
        l.parent[j] = static_cast<int>(jp);
      }
    }
  }
  return l;
}

TimedPath assembleTimedPath(const std::vector<Vec3>& vertices,
                            const std::vector<SafeIntervalSet>& edge_si,
                            const std::vector<ArrivalLayer>& layers, const DynamicBounds& bounds,
                            double t_start) {
  const size_t m = layers.size();
  if (m == 0 || vertices.size() != m + 1 || edge_si.size() != m)
    throw std::invalid_argument("assembleTimedPath: size mismatch");
  int j = -1;
  const ArrivalLayer& last = layers.back();
  for (size_t k = 0; k < last.arrival.size(); ++k)
    if (last.arrival[k] < kInfinity && (j < 0 || last.arrival[k] < last.arrival[j]))
      j = static_cast<int>(k);
  if (j < 0) throw std::invalid_argument("assembleTimedPath: infeasible layers");

  TimedPath tp;
  tp.vertices = vertices;
  tp.bounds = bounds;
  tp.arrive.assign(m + 1, 0.0);
  tp.depart.assign(m + 1, 0.0);
  tp.chosen.resize(m);
  for (size_t i = m; i-- > 0;) {
    tp.chosen[i] = edge_si[i][j];
    tp.depart[i] = layers[i].departure[j];
    tp.arrive[i + 1] = layers[i].arrival[j];
    j = layers[i].parent[j];
  }
  tp.arrive[0] = t_start;
  tp.depart[m] = tp.arrive[m];
  return tp;
}

std::optional<TimedPath> earliestArrival(const std::vector<Vec3>& vertices,
                                         const std::vector<SafeIntervalSet>& edge_si,
                                         const std::vector<double>& durations,
                                         const DynamicBounds& bounds, double t_start,
                                         double hold_until) {
  const size_t m = edge_si.size();
  if (vertices.size() != m + 1 || durations.size() != m)
    throw std::invalid_argument("earliestArrival: size mismatch");
  if (m == 0) return std::nullopt;
  std::vector<ArrivalLayer> layers;
  layers.push_back(firstArrivalLayer(edge_si[0], durations[0], t_start, hold_until));
  for (size_t i = 1; i < m && layers.back().feasible(); ++i)
    layers.push_back(nextArrivalLayer(layers.back(), edge_si[i - 1], edge_si[i], durations[i]));
  if (layers.size() < m || !layers.back().feasible()) return std::nullopt;
  return assembleTimedPath(vertices, edge_si, layers, bounds, t_start);
}

std::optional<TimedPath> earliestArrival(const std::vector<Vec3>& vertices,
                                         const std::vector<SafeIntervalSet>& edge_si,
                                         const DynamicBounds& bounds, double t_start,
                                         double hold_until) {
  std::vector<double> durations;
  for (size_t i = 0; i + 1 < vertices.size(); ++i)
    durations.push_back(minTravelTime((vertices[i + 1] - vertices[i]).norm(), bounds));
  return earliestArrival(vertices, edge_si, durations, bounds, t_start, hold_until);
}

}  // namespace sitmp
