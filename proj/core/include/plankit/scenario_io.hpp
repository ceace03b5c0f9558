#pragma once

#include <string>
#include <vector>

#include "plankit/scenario.hpp"

namespace plankit {

// Scenario container format: one JSON record per line. Each record carries
// map.lanes (points, speed_limit, left_neighbor, right_neighbor),
// map.crosswalks, agents (id, kind, length, width, x/y/heading/speed arrays
// of 71 samples), av_index and timestep_s. Unknown fields are rejected.
// Saving then reloading then saving again is byte-identical.
std::vector<Scenario> load_scenarios(const std::string& path);
void save_scenarios(const std::string& path, const std::vector<Scenario>& scenarios);

// Single-record (de)serialization used by both the file functions and tests.
std::string scenario_to_json_line(const Scenario& scenario);
Scenario scenario_from_json_line(const std::string& line, std::size_t record_index);

}  // namespace plankit
