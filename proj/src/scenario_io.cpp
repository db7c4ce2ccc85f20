#include "sitmp/scenario_io.hpp"

#include <fstream>
#include <sstream>

namespace sitmp {

using nlohmann::json;

std::vector<std::array<int, 6>> occupancyBoxes(const StaticGrid& grid) {
  const auto& d = grid.dims();
  std::vector<uint8_t> used(grid.cellCount(), 0);
  auto idx = [&](int x, int y, int z) { return (static_cast<size_t>(z) * d[1] + y) * d[0] + x; };
  auto avail = [&](int x, int y, int z) {
    return grid.raw()[idx(x, y, z)] != 0 && used[idx(x, y, z)] == 0;
  };

  std::vector<std::array<int, 6>> boxes;
  for (int z = 0; z < d[2]; ++z)
    for (int y = 0; y < d[1]; ++y)
      for (int x = 0; x < d[0]; ++x) {
        if (!avail(x, y, z)) continue;
        int x1 = x + 1;
        while (x1 < d[0] && avail(x1, y, z)) ++x1;
        int y1 = y + 1;
        auto rowFree = [&](int yy, int zz) {
          for (int xx = x; xx < x1; ++xx)
            if (!avail(xx, yy, zz)) return false;
          return true;
        };
        while (y1 < d[1] && rowFree(y1, z)) ++y1;
        int z1 = z + 1;
        auto slabFree = [&](int zz) {
          for (int yy = y; yy < y1; ++yy)
            if (!rowFree(yy, zz)) return false;
          return true;
        };
        while (z1 < d[2] && slabFree(z1)) ++z1;
        for (int zz = z; zz < z1; ++zz)
          for (int yy = y; yy < y1; ++yy)
            for (int xx = x; xx < x1; ++xx) used[idx(xx, yy, zz)] = 1;
        boxes.push_back({x, y, z, x1, y1, z1});
      }
  return boxes;
}

json vecToJson(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vecFromJson(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

namespace {

json intervalToJson(const TimeInterval& t) { return json::array({t.lo, t.hi}); }

TimeInterval intervalFromJson(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("expected an interval [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

json environmentToJson(const Environment& env) {
  const auto& g = env.grid();
  json grid;
  grid["origin"] = vecToJson(g.origin());
  grid["resolution"] = g.resolution();
  grid["dims"] = json::array({g.dims()[0], g.dims()[1], g.dims()[2]});
  grid["boxes"] = json::array();
  for (const auto& b : occupancyBoxes(g)) grid["boxes"].push_back(b);

  json obstacles = json::array();
  for (const auto& o : env.obstacles()) {
    json jo;
    jo["semi_axes"] = vecToJson(o.semi_axes);
    jo["coeffs"] = json::array();
    for (const auto& p : o.coeffs) jo["coeffs"].push_back(p.coeffs());
    jo["active"] = intervalToJson(o.active);
    obstacles.push_back(std::move(jo));
  }

  json j;
  j["grid"] = std::move(grid);
  j["obstacles"] = std::move(obstacles);
  j["horizon"] = intervalToJson(env.horizon());
  j["robot_radius"] = env.robotRadius();
  return j;
}

Environment environmentFromJson(const json& j) {
  try {
    const json& jg = j.at("grid");
    const auto dims = jg.at("dims").get<std::array<int, 3>>();
    StaticGrid grid(vecFromJson(jg.at("origin")), jg.at("resolution").get<double>(), dims);
    for (const auto& jb : jg.at("boxes")) {
      const auto b = jb.get<std::array<int, 6>>();
      for (int z = b[2]; z < b[5]; ++z)
        for (int y = b[1]; y < b[4]; ++y)
          for (int x = b[0]; x < b[3]; ++x) {
            if (!grid.inBounds(CellIndex{x, y, z}))
              throw ParseError("occupancy box exceeds grid dims");
            grid.setOccupied({x, y, z}, true);
          }
    }
    std::vector<MovingObstacle> obstacles;
    for (const auto& jo : j.at("obstacles")) {
      MovingObstacle o;
      o.semi_axes = vecFromJson(jo.at("semi_axes"));
      const auto& jc = jo.at("coeffs");
      if (!jc.is_array() || jc.size() != 3) throw ParseError("obstacle needs 3 coefficient arrays");
      for (int k = 0; k < 3; ++k) o.coeffs[k] = Polynomial(jc[k].get<std::vector<double>>());
      o.active = intervalFromJson(jo.at("active"));
      obstacles.push_back(std::move(o));
    }
    return Environment(std::move(grid), std::move(obstacles), intervalFromJson(j.at("horizon")),
                       j.at("robot_radius").get<double>());
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed environment: ") + e.what());
  }
}

json scenarioToJson(const Scenario& s) {
  json j;
  j["schema"] = kScenarioSchema;
  j["environment"] = environmentToJson(s.env);
  if (s.start || s.goal) {
    json q;
    if (s.start) q["start"] = vecToJson(*s.start);
    if (s.goal) q["goal"] = vecToJson(*s.goal);
    j["query"] = std::move(q);
  }
  if (!s.planner.empty()) j["planner"] = s.planner;
  return j;
}

Scenario scenarioFromJson(const json& j) {
  if (!j.is_object() || j.value("schema", std::string()) != kScenarioSchema)
    throw ParseError(std::string("scenario schema must be ") + kScenarioSchema);
  Scenario s;
  s.env = environmentFromJson(j.at("environment"));
  if (j.contains("query")) {
    const auto& q = j["query"];
    if (q.contains("start")) s.start = vecFromJson(q["start"]);
    if (q.contains("goal")) s.goal = vecFromJson(q["goal"]);
  }
  if (j.contains("planner")) s.planner = j["planner"];
  return s;
}

std::string writeScenario(const Scenario& s) { return scenarioToJson(s).dump(1) + "\n"; }

Scenario readScenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario is not valid JSON: ") + e.what());
  }
  return scenarioFromJson(j);
}

std::string readTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

Scenario loadScenarioFile(const std::string& path) { return readScenario(readTextFile(path)); }

void saveScenarioFile(const Scenario& s, const std::string& path) {
  writeTextFile(path, writeScenario(s));
}

}  // namespace sitmp
