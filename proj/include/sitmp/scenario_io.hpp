#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "sitmp/environment.hpp"

namespace sitmp {

inline constexpr const char* kScenarioSchema = "sitmp-scenario/1";

/// Scenario file contents: world plus an optional query and planner config.
struct Scenario {
  Environment env;
  std::optional<Vec3> start;
  std::optional<Vec3> goal;
  /// Opaque planner/optimizer settings; interpreted by the planner.
  nlohmann::json planner = nlohmann::json::object();
};

/// Occupied cells merged into half-open cell-index boxes [x0,y0,z0,x1,y1,z1).
std::vector<std::array<int, 6>> occupancyBoxes(const StaticGrid& grid);

nlohmann::json vecToJson(const Vec3& v);
Vec3 vecFromJson(const nlohmann::json& j);

nlohmann::json environmentToJson(const Environment& env);
Environment environmentFromJson(const nlohmann::json& j);

nlohmann::json scenarioToJson(const Scenario& s);
Scenario scenarioFromJson(const nlohmann::json& j);

std::string writeScenario(const Scenario& s);
Scenario readScenario(const std::string& text);

Scenario loadScenarioFile(const std::string& path);
void saveScenarioFile(const Scenario& s, const std::string& path);

std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& text);

}  // namespace sitmp
