#include "plankit/scenario_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "plankit/errors.hpp"

namespace plankit {
namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& where, std::size_t record) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ValidationError("record " + std::to_string(record) + ": unknown field '" +
                            key + "' in " + where);
  }
}

const json& require(const json& obj, const char* key, const std::string& where,
                    std::size_t record) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError("record " + std::to_string(record) + ": missing field '" +
                          std::string(key) + "' in " + where);
  return *it;
}

std::vector<Eigen::Vector2d> parse_points(const json& arr, const std::string& where,
                                          std::size_t record) {
  if (!arr.is_array())
    throw ValidationError("record " + std::to_string(record) + ": " + where +
                          " must be an array of [x, y] pairs");
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(arr.size());
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2)
      throw ValidationError("record " + std::to_string(record) + ": " + where +
                            " must hold [x, y] pairs");
    pts.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return pts;
}

json points_to_json(const std::vector<Eigen::Vector2d>& pts) {
  json arr = json::array();
  for (const auto& p : pts) arr.push_back(json::array({p.x(), p.y()}));
  return arr;
}

}  // namespace

std::string scenario_to_json_line(const Scenario& scenario) {
  json rec;
  rec["av_index"] = scenario.av_index;
  rec["timestep_s"] = scenario.timestep_s;

  json lanes = json::array();
  for (const Lane& lane : scenario.map.lanes) {
    json jl;
    jl["points"] = points_to_json(lane.centerline);
    jl["speed_limit"] = lane.speed_limit;
    jl["left_neighbor"] = lane.left_neighbor < 0 ? json(nullptr) : json(lane.left_neighbor);
    jl["right_neighbor"] =
        lane.right_neighbor < 0 ? json(nullptr) : json(lane.right_neighbor);
    lanes.push_back(std::move(jl));
  }
  json crosswalks = json::array();
  for (const auto& poly : scenario.map.crosswalks) crosswalks.push_back(points_to_json(poly));
  rec["map"] = json{{"lanes", std::move(lanes)}, {"crosswalks", std::move(crosswalks)}};

  json agents = json::array();
  for (const AgentTrack& track : scenario.agents) {
    json ja;
    ja["id"] = track.id;
    ja["kind"] = to_string(track.kind);
    ja["length"] = track.length;
    ja["width"] = track.width;
    json x = json::array(), y = json::array(), heading = json::array(),
         speed = json::array();
    for (const Pose& p : track.states) {
      x.push_back(p.x);
      y.push_back(p.y);
      heading.push_back(p.heading);
      speed.push_back(p.speed);
    }
    ja["x"] = std::move(x);
    ja["y"] = std::move(y);
    ja["heading"] = std::move(heading);
    ja["speed"] = std::move(speed);
    agents.push_back(std::move(ja));
  }
  rec["agents"] = std::move(agents);
  return rec.dump();
}

Scenario scenario_from_json_line(const std::string& line, std::size_t record) {
  json rec;
  try {
    rec = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError("record " + std::to_string(record) + ": " + e.what());
  }
  if (!rec.is_object())
    throw ValidationError("record " + std::to_string(record) + ": not a JSON object");
  reject_unknown_keys(rec, {"agents", "av_index", "map", "timestep_s"}, "record", record);

  Scenario sc;
  sc.av_index = require(rec, "av_index", "record", record).get<int>();
  sc.timestep_s = require(rec, "timestep_s", "record", record).get<double>();

  const json& map = require(rec, "map", "record", record);
  reject_unknown_keys(map, {"lanes", "crosswalks"}, "map", record);
  for (const json& jl : require(map, "lanes", "map", record)) {
    reject_unknown_keys(jl, {"points", "speed_limit", "left_neighbor", "right_neighbor"},
                        "lane", record);
    Lane lane;
    lane.centerline = parse_points(require(jl, "points", "lane", record), "lane points", record);
    lane.speed_limit = require(jl, "speed_limit", "lane", record).get<double>();
    const json& left = require(jl, "left_neighbor", "lane", record);
    const json& right = require(jl, "right_neighbor", "lane", record);
    lane.left_neighbor = left.is_null() ? -1 : left.get<int>();
    lane.right_neighbor = right.is_null() ? -1 : right.get<int>();
    sc.map.lanes.push_back(std::move(lane));
  }
  for (const json& poly : require(map, "crosswalks", "map", record))
    sc.map.crosswalks.push_back(parse_points(poly, "crosswalk", record));

  for (const json& ja : require(rec, "agents", "record", record)) {
    reject_unknown_keys(ja, {"id", "kind", "length", "width", "x", "y", "heading", "speed"},
                        "agent", record);
    AgentTrack track;
    track.id = require(ja, "id", "agent", record).get<int>();
    track.kind = agent_kind_from_string(require(ja, "kind", "agent", record).get<std::string>());
    track.length = require(ja, "length", "agent", record).get<double>();
    track.width = require(ja, "width", "agent", record).get<double>();
    const json& x = require(ja, "x", "agent", record);
    const json& y = require(ja, "y", "agent", record);
    const json& heading = require(ja, "heading", "agent", record);
    const json& speed = require(ja, "speed", "agent", record);
    if (x.size() != y.size() || x.size() != heading.size() || x.size() != speed.size())
      throw ValidationError("record " + std::to_string(record) +
                            ": agent state arrays differ in length");
    track.states.resize(x.size());
    for (std::size_t t = 0; t < x.size(); ++t) {
      track.states[t] = Pose{x[t].get<double>(), y[t].get<double>(),
                             heading[t].get<double>(), speed[t].get<double>()};
    }
    sc.agents.push_back(std::move(track));
  }

  validate_scenario(sc, "record " + std::to_string(record));
  return sc;
}

std::vector<Scenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::vector<Scenario> out;
  std::string line;
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.empty()) {
      ++record;
      continue;
    }
    out.push_back(scenario_from_json_line(line, record));
    ++record;
  }
  return out;
}

void save_scenarios(const std::string& path, const std::vector<Scenario>& scenarios) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const Scenario& sc : scenarios) out << scenario_to_json_line(sc) << '\n';
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace plankit
