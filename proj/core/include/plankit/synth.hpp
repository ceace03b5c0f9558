#pragma once

#include <string>
#include <vector>

#include "plankit/scenario.hpp"

namespace plankit {

enum class ScenarioTemplate {
  kCarFollow,
  kCutIn,
  kLaneChange,
  kIntersectionYield,
  kCurvedRoad,
};

std::string to_string(ScenarioTemplate t);
ScenarioTemplate template_from_string(const std::string& name);

// Deterministically generate `count` randomized scenarios of one template.
// Every agent's full 71-step track (history and future alike) comes from one
// closed-loop IDM simulation, so demonstrations are kinematically consistent.
std::vector<Scenario> synthesize_scenarios(ScenarioTemplate tmpl, int count,
                                           std::uint64_t seed);

// Round-robin over all five templates; convenient for mixed corpora.
std::vector<Scenario> synthesize_mixed(int count, std::uint64_t seed);

}  // namespace plankit
