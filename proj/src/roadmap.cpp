#include "sitmp/roadmap.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <stdexcept>

#include "sitmp/scenario_io.hpp"
#include "sitmp/utvd.hpp"

namespace sitmp {

int RoadmapGraph::addVertex(const Vec3& p, VertexKind kind, double hold_until) {
  vertices_.push_back({p, kind, hold_until});
  adjacency_.emplace_back();
  return static_cast<int>(vertices_.size()) - 1;
}

int RoadmapGraph::addEdge(int a, int b, SafeIntervalSet si, double t_min) {
  const int id = static_cast<int>(edges_.size());
  edges_.push_back({a, b, (vertices_[a].position - vertices_[b].position).norm(), std::move(si),
                    t_min});
  adjacency_[a].push_back(id);
  adjacency_[b].push_back(id);
  return id;
}

void RoadmapGraph::relocateConnector(int v, const Vec3& p, SafeIntervalSet si_a,
                                     SafeIntervalSet si_b, double t_min_a, double t_min_b) {
  if (vertices_[v].kind != VertexKind::Connector || adjacency_[v].size() != 2)
    throw std::logic_error("relocateConnector: vertex is not a two-edge connector");
  vertices_[v].position = p;
  SafeIntervalSet* sis[2] = {&si_a, &si_b};
  const double tmins[2] = {t_min_a, t_min_b};
  for (int k = 0; k < 2; ++k) {
    RoadmapEdge& e = edges_[adjacency_[v][k]];
    e.length = (vertices_[e.a].position - vertices_[e.b].position).norm();
    e.si = std::move(*sis[k]);
    e.t_min = tmins[k];
  }
}

std::optional<int> RoadmapGraph::edgeBetween(int a, int b) const {
  for (int e : adjacency_[a])
    if (edges_[e].other(a) == b) return e;
  return std::nullopt;
}

std::vector<int> RoadmapGraph::sharedConnectors(int g1, int g2) const {
  std::vector<int> out;
  for (int e : adjacency_[g1]) {
    const int n = edges_[e].other(g1);
    if (vertices_[n].kind == VertexKind::Connector && edgeBetween(n, g2)) out.push_back(n);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<int> RoadmapGraph::guards() const {
  std::vector<int> out;
  for (size_t i = 0; i < vertices_.size(); ++i)
    if (vertices_[i].kind == VertexKind::Guard) out.push_back(static_cast<int>(i));
  return out;
}

size_t RoadmapGraph::connectorCount() const {
  return std::count_if(vertices_.begin(), vertices_.end(),
                       [](const RoadmapVertex& v) { return v.kind == VertexKind::Connector; });
}

int CellRatios::cellOf(const Box3& bounds, const Vec3& p) {
  int idx[3];
  for (int k = 0; k < 3; ++k) {
    const double ext = bounds.hi[k] - bounds.lo[k];
    const double u = ext > 0.0 ? (p[k] - bounds.lo[k]) / ext : 0.0;
    idx[k] = std::clamp(static_cast<int>(std::floor(4.0 * u)), 0, 3);
  }
  return idx[0] + 4 * idx[1] + 16 * idx[2];
}

Box3 CellRatios::cellBox(const Box3& bounds, int cell) {
  const int idx[3] = {cell % 4, (cell / 4) % 4, cell / 16};
  Box3 b;
  for (int k = 0; k < 3; ++k) {
    const double w = (bounds.hi[k] - bounds.lo[k]) / 4.0;
    b.lo[k] = bounds.lo[k] + idx[k] * w;
    b.hi[k] = b.lo[k] + w;
  }
  return b;
}

std::optional<int> CellRatios::lowestRatioCell() const {
  std::optional<int> best;
  for (int c = 0; c < kCells; ++c) {
    if (guards[c] == 0) continue;
    // Compare connectors[c]/guards[c] < connectors[b]/guards[b] without division.
    if (!best || static_cast<long>(connectors[c]) * guards[*best] <
                     static_cast<long>(connectors[*best]) * guards[c])
      best = c;
  }
  return best;
}

CellRatios cellRatios(const RoadmapGraph& graph, const Box3& bounds) {
  CellRatios r;
  for (const auto& v : graph.vertices()) {
    const int c = CellRatios::cellOf(bounds, v.position);
    if (v.kind == VertexKind::Guard)
      ++r.guards[c];
    else
      ++r.connectors[c];
  }
  return r;
}

namespace {

Vec3 uniformIn(const Box3& b, std::mt19937_64& rng) {
  Vec3 p;
  for (int k = 0; k < 3; ++k)
    p[k] = std::uniform_real_distribution<double>(b.lo[k], b.hi[k])(rng);
  return p;
}

}  // namespace

Vec3 getSample(const RoadmapGraph& graph, const Box3& bounds, std::mt19937_64& rng,
               double p_uniform) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  if (u >= p_uniform) {
    if (auto cell = cellRatios(graph, bounds).lowestRatioCell())
      return uniformIn(CellRatios::cellBox(bounds, *cell), rng);
  }
  return uniformIn(bounds, rng);
}

double pointHoldUntil(const Environment& env, const Vec3& p) {
  const TimeInterval& h = env.horizon();
  const auto blocked = boxCollisionIntervals(env, Box3{p, p}, h);
  for (const auto& w : complementIn(blocked, h))
    if (w.contains(h.lo)) return w.hi;
  return -kInfinity;
}

Box3 samplingBounds(const Environment& env) {
  const Box3 b = env.grid().bounds();
  const Vec3 m = Vec3::Constant(env.robotRadius() + env.clearanceSlack());
  return {b.lo + m, b.hi - m};
}

RoadmapGraph buildGraph(const Environment& env, const Vec3& x_s, const Vec3& x_g,
                        const DynamicBounds& bounds, const GraphBudget& budget,
                        GraphStats* stats) {
  bounds.validate();
  if (!env.staticClear(x_s)) throw InputError("start position is in static collision");
  if (!env.staticClear(x_g)) throw InputError("goal position is in static collision");
  RoadmapGraph graph;
  graph.rng_seed = budget.seed;
  graph.addVertex(x_s, VertexKind::Guard, pointHoldUntil(env, x_s));
  graph.addVertex(x_g, VertexKind::Guard, pointHoldUntil(env, x_g));
  std::mt19937_64 rng(budget.seed);
  growGraph(graph, env, bounds, budget, rng, stats);
  return graph;
}

void growGraph(RoadmapGraph& graph, const Environment& env, const DynamicBounds& bounds,
               const GraphBudget& budget, std::mt19937_64& rng, GraphStats* stats) {
  GraphStats local;
  GraphStats& st = stats ? *stats : local;
  const auto t_begin = std::chrono::steady_clock::now();
  const Box3 region = samplingBounds(env);
  const double t0 = env.horizon().lo;

  struct Visible {
    int guard;
    SafeIntervalSet si;
    double t_min;
  };

  for (int n = 0; n < budget.n_samples; ++n) {
    if (budget.wall_ms > 0.0) {
      const std::chrono::duration<double, std::milli> el =
          std::chrono::steady_clock::now() - t_begin;
      if (el.count() > budget.wall_ms) break;
    }
    const Vec3 v = getSample(graph, region, rng, budget.p_uniform);
    ++st.samples;
    if (!env.staticClear(v)) {
      ++st.rejected_static;
      continue;
    }

    std::vector<Visible> visible;
    for (int g : graph.guards()) {
      const Vec3& pg = graph.vertices()[g].position;
      const double t_min = minTravelTime((pg - v).norm(), bounds);
      SafeIntervalSet si = edgeSafeIntervals(env, pg, v, t_min);
      if (si.empty()) continue;
      visible.push_back({g, std::move(si), t_min});
      if (visible.size() > 2) break;
    }

    if (visible.empty()) {
      graph.addVertex(v, VertexKind::Guard, pointHoldUntil(env, v));
      ++st.new_guards;
      continue;
    }
    if (visible.size() != 2) {
      ++st.discarded_visibility;
      continue;
    }

    const Visible& e1 = visible[0];
    const Visible& e2 = visible[1];
    if (intersect(e1.si, e2.si).empty()) {
      ++st.discarded_overlap;
      continue;
    }

    const Vec3& p1 = graph.vertices()[e1.guard].position;
    const Vec3& p2 = graph.vertices()[e2.guard].position;
    const double hold1 = graph.vertices()[e1.guard].hold_until;
    const double hold2 = graph.vertices()[e2.guard].hold_until;
    const auto fwd =
        earliestArrival({p1, v, p2}, {e1.si, e2.si}, {e1.t_min, e2.t_min}, bounds, t0, hold1);
    const auto rev =
        earliestArrival({p2, v, p1}, {e2.si, e1.si}, {e2.t_min, e1.t_min}, bounds, t0, hold2);
    const double len_new = (p1 - v).norm() + (v - p2).norm();

    bool same = false;
    for (int nb : graph.sharedConnectors(e1.guard, e2.guard)) {
      const RoadmapEdge& a = graph.edges()[*graph.edgeBetween(e1.guard, nb)];
      const RoadmapEdge& b = graph.edges()[*graph.edgeBetween(nb, e2.guard)];
      const Vec3& pn = graph.vertices()[nb].position;
      bool eq = false;
      if (fwd) {
        const auto nf =
            earliestArrival({p1, pn, p2}, {a.si, b.si}, {a.t_min, b.t_min}, bounds, t0, hold1);
        eq = nf && checkEquiv(*fwd, *nf, env, budget.equiv_samples);
      }
      if (!eq && rev) {
        const auto nr =
            earliestArrival({p2, pn, p1}, {b.si, a.si}, {b.t_min, a.t_min}, bounds, t0, hold2);
        eq = nr && checkEquiv(*rev, *nr, env, budget.equiv_samples);
      }
      if (!eq) continue;
      same = true;
      const double len_old = a.length + b.length;
      if (len_new * len_new < len_old * len_old) {
        // Edge order at the connector follows insertion: first toward g1.
        const bool a_first = graph.incident(nb)[0] == *graph.edgeBetween(e1.guard, nb);
        if (a_first)
          graph.relocateConnector(nb, v, e1.si, e2.si, e1.t_min, e2.t_min);
        else
          graph.relocateConnector(nb, v, e2.si, e1.si, e2.t_min, e1.t_min);
        ++st.replaced;
      } else {
        ++st.discarded_equivalent;
      }
      break;
    }
    if (!same) {
      const int c = graph.addVertex(v, VertexKind::Connector);
      graph.addEdge(e1.guard, c, e1.si, e1.t_min);
      graph.addEdge(c, e2.guard, e2.si, e2.t_min);
      ++st.new_connectors;
    }
  }
}

std::vector<VertexPath> extractPaths(const RoadmapGraph& graph, int start, int goal, int k_max,
                                     int vertex_cap) {
  std::vector<VertexPath> out;
  if (k_max <= 0) return out;
  const auto& verts = graph.vertices();
  const Vec3& pg = verts[goal].position;
  std::vector<char> on_path(verts.size(), 0);
  VertexPath path{start};
  on_path[start] = 1;
  std::set<VertexPath> seen;
  long expansions = 0;
  constexpr long kMaxExpansions = 200000;

  std::function<void(int)> dfs = [&](int u) {
    if (static_cast<int>(out.size()) >= k_max || expansions > kMaxExpansions) return;
    ++expansions;
    if (u == goal) {
      if (seen.insert(path).second) out.push_back(path);
      return;
    }
    if (static_cast<int>(path.size()) >= vertex_cap) return;
    std::vector<int> next;
    for (int e : graph.incident(u)) {
      const int w = graph.edges()[e].other(u);
      if (!on_path[w]) next.push_back(w);
    }
    std::sort(next.begin(), next.end(), [&](int x, int y) {
      const double dx = (verts[x].position - pg).squaredNorm();
      const double dy = (verts[y].position - pg).squaredNorm();
      return dx < dy || (dx == dy && x < y);
    });
    for (int w : next) {
      on_path[w] = 1;
      path.push_back(w);
      dfs(w);
      path.pop_back();
      on_path[w] = 0;
      if (static_cast<int>(out.size()) >= k_max) return;
    }
  };
  dfs(start);
  return out;
}

std::vector<TimedPath> extractTimedPaths(const RoadmapGraph& graph, int start, int goal,
                                         const DynamicBounds& bounds, double t_start, int k_max,
                                         int vertex_cap) {
  std::vector<TimedPath> out;
  if (k_max <= 0 || start == goal) return out;
  const auto& verts = graph.vertices();
  const Vec3& pg = verts[goal].position;
  std::vector<char> on_path(verts.size(), 0);
  std::vector<int> path{start};
  std::vector<const SafeIntervalSet*> sis;
  std::vector<ArrivalLayer> layers;
  on_path[start] = 1;
  long expansions = 0;
  constexpr long kMaxExpansions = 200000;

  std::function<void(int)> dfs = [&](int u) {
    if (static_cast<int>(out.size()) >= k_max || expansions > kMaxExpansions) return;
    ++expansions;
    if (u == goal) {
      std::vector<Vec3> pts;
      std::vector<SafeIntervalSet> edge_si;
      for (int v : path) pts.push_back(verts[v].position);
      for (const auto* si : sis) edge_si.push_back(*si);
      out.push_back(assembleTimedPath(pts, edge_si, layers, bounds, t_start));
      return;
    }
    if (static_cast<int>(path.size()) >= vertex_cap) return;
    std::vector<int> next;
    for (int e : graph.incident(u)) {
      const int w = graph.edges()[e].other(u);
      if (!on_path[w]) next.push_back(e);
    }
    std::sort(next.begin(), next.end(), [&](int ex, int ey) {
      const int x = graph.edges()[ex].other(u);
      const int y = graph.edges()[ey].other(u);
      const double dx = (verts[x].position - pg).squaredNorm();
      const double dy = (verts[y].position - pg).squaredNorm();
      return dx < dy || (dx == dy && x < y);
    });
    for (int e : next) {
      const RoadmapEdge& edge = graph.edges()[e];
      const int w = edge.other(u);
      ArrivalLayer layer =
          layers.empty()
              ? firstArrivalLayer(edge.si, edge.t_min, t_start, verts[start].hold_until)
              : nextArrivalLayer(layers.back(), *sis.back(), edge.si, edge.t_min);
      if (!layer.feasible()) continue;
      on_path[w] = 1;
      path.push_back(w);
      sis.push_back(&edge.si);
      layers.push_back(std::move(layer));
      dfs(w);
      layers.pop_back();
      sis.pop_back();
      path.pop_back();
      on_path[w] = 0;
      if (static_cast<int>(out.size()) >= k_max) return;
    }
  };
  dfs(start);
  return out;
}

std::optional<TimedPath> timeParameterize(const VertexPath& path, const RoadmapGraph& graph,
                                          const DynamicBounds& bounds, double t_start) {
  if (path.size() < 2) return std::nullopt;
  std::vector<Vec3> pts;
  std::vector<SafeIntervalSet> sis;
  std::vector<double> durations;
  for (size_t i = 0; i < path.size(); ++i) {
    pts.push_back(graph.vertices()[path[i]].position);
    if (i + 1 < path.size()) {
      const auto e = graph.edgeBetween(path[i], path[i + 1]);
      if (!e) throw std::invalid_argument("timeParameterize: path uses a missing edge");
      sis.push_back(graph.edges()[*e].si);
      durations.push_back(graph.edges()[*e].t_min);
    }
  }
  return earliestArrival(pts, sis, durations, bounds, t_start,
                         graph.vertices()[path.front()].hold_until);
}

std::vector<TimeInterval> TemporalCorridor::overlaps() const {
  std::vector<TimeInterval> out;
  for (size_t i = 0; i + 1 < intervals.size(); ++i)
    out.emplace_back(std::max(intervals[i].lo, intervals[i + 1].lo),
                     std::min(intervals[i].hi, intervals[i + 1].hi));
  return out;
}

TemporalCorridor TemporalCorridor::reversed() const {
  TemporalCorridor r;
  r.intervals.assign(intervals.rbegin(), intervals.rend());
  r.forward = !forward;
  return r;
}

TemporalCorridor temporalCorridor(const TimedPath& tp) {
  TemporalCorridor c;
  c.intervals = tp.chosen;
  for (size_t i = 0; i + 1 < c.intervals.size(); ++i) {
    const double lo = std::max(c.intervals[i].lo, c.intervals[i + 1].lo);
    const double hi = std::min(c.intervals[i].hi, c.intervals[i + 1].hi);
    if (lo > hi)
      throw std::logic_error("temporal corridor: intervals " + std::to_string(i) + " and " +
                             std::to_string(i + 1) + " do not overlap");
  }
  return c;
}

nlohmann::json graphToJson(const RoadmapGraph& graph) {
  using nlohmann::json;
  json j;
  j["schema"] = kGraphSchema;
  j["rng_seed"] = graph.rng_seed;
  j["vertices"] = json::array();
  for (size_t i = 0; i < graph.vertices().size(); ++i) {
    const auto& v = graph.vertices()[i];
    j["vertices"].push_back({{"id", i},
                             {"position", vecToJson(v.position)},
                             {"kind", v.kind == VertexKind::Guard ? "guard" : "connector"}});
  }
  j["edges"] = json::array();
  for (const auto& e : graph.edges()) {
    json si = json::array();
    for (const auto& iv : e.si) si.push_back({iv.lo, iv.hi});
    j["edges"].push_back(
        {{"a", e.a}, {"b", e.b}, {"length", e.length}, {"t_min", e.t_min}, {"si", si}});
  }
  return j;
}

}  // namespace sitmp
