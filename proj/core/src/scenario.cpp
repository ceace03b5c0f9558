#include "plankit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "plankit/errors.hpp"

namespace plankit {

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kVehicle: return "vehicle";
    case AgentKind::kPedestrian: return "pedestrian";
    case AgentKind::kCyclist: return "cyclist";
  }
  return "vehicle";
}

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "vehicle") return AgentKind::kVehicle;
  if (name == "pedestrian") return AgentKind::kPedestrian;
  if (name == "cyclist") return AgentKind::kCyclist;
  throw ValidationError("unknown agent kind '" + name + "'");
}

AgentState state_at(const AgentTrack& track, std::size_t step) {
  const Pose& pose = track.states.at(step);
  return AgentState{pose.x, pose.y, pose.heading, pose.speed,
                    track.length, track.width, track.kind};
}

namespace {

bool finite_pose(const Pose& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.heading) &&
         std::isfinite(p.speed);
}

}  // namespace

void validate_scenario(const Scenario& scenario, const std::string& label) {
  auto fail = [&](const std::string& what) {
    throw ValidationError(label.empty() ? what : label + ": " + what);
  };
  if (scenario.agents.empty()) fail("scenario has no agents");
  if (scenario.av_index < 0 ||
      scenario.av_index >= static_cast<int>(scenario.agents.size()))
    fail("av_index " + std::to_string(scenario.av_index) + " out of range");
  if (std::abs(scenario.timestep_s - kDt) > 1e-9)
    fail("timestep_s must be 0.1");
  if (scenario.map.lanes.empty()) fail("map has no lanes");
  for (std::size_t a = 0; a < scenario.agents.size(); ++a) {
    const AgentTrack& track = scenario.agents[a];
    std::string who = "agent " + std::to_string(a);
    if (track.states.size() != kTrackSteps)
      fail(who + " has " + std::to_string(track.states.size()) +
           " states, expected " + std::to_string(kTrackSteps));
    if (!(track.length > 0.0) || !(track.width > 0.0))
      fail(who + " has non-positive box dimensions");
    for (const Pose& p : track.states) {
      if (!finite_pose(p)) fail(who + " has a non-finite state");
      if (p.speed < 0.0) fail(who + " has a negative speed");
    }
  }
  for (std::size_t l = 0; l < scenario.map.lanes.size(); ++l) {
    const Lane& lane = scenario.map.lanes[l];
    std::string which = "lane " + std::to_string(l);
    if (lane.centerline.size() < 2) fail(which + " centerline too short");
    if (!(lane.speed_limit > 0.0)) fail(which + " has non-positive speed limit");
    int n = static_cast<int>(scenario.map.lanes.size());
    for (int nb : {lane.left_neighbor, lane.right_neighbor}) {
      if (nb < -1 || nb >= n) fail(which + " neighbor index out of range");
    }
    // Adjacency must be symmetric: my left neighbor's right neighbor is me.
    if (lane.left_neighbor >= 0 &&
        scenario.map.lanes[static_cast<std::size_t>(lane.left_neighbor)].right_neighbor !=
            static_cast<int>(l))
      fail(which + " left adjacency is not symmetric");
    if (lane.right_neighbor >= 0 &&
        scenario.map.lanes[static_cast<std::size_t>(lane.right_neighbor)].left_neighbor !=
            static_cast<int>(l))
      fail(which + " right adjacency is not symmetric");
  }
}

double distance_to_lane(const Lane& lane, double x, double y) {
  Eigen::Vector2d p(x, y);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
    Eigen::Vector2d a = lane.centerline[i];
    Eigen::Vector2d ab = lane.centerline[i + 1] - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    best = std::min(best, (a + t * ab - p).norm());
  }
  return best;
}

std::size_t nearest_lane(const MapModel& map, double x, double y) {
  if (map.lanes.empty()) throw ValidationError("map has no lanes");
  std::size_t best_i = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < map.lanes.size(); ++i) {
    double d = distance_to_lane(map.lanes[i], x, y);
    if (d < best) {
      best = d;
      best_i = i;
    }
  }
  return best_i;
}

std::vector<int> select_predicted_agents(const Scenario& scenario, int max_agents) {
  const Pose& av = scenario.av().current();
  std::vector<std::pair<double, int>> by_distance;
  for (int i = 0; i < static_cast<int>(scenario.agents.size()); ++i) {
    if (i == scenario.av_index) continue;
    const Pose& p = scenario.agents[static_cast<std::size_t>(i)].current();
    by_distance.emplace_back(std::hypot(p.x - av.x, p.y - av.y), i);
  }
  std::sort(by_distance.begin(), by_distance.end());
  if (static_cast<int>(by_distance.size()) > max_agents)
    by_distance.resize(static_cast<std::size_t>(max_agents));
  std::vector<int> kept;
  kept.reserve(by_distance.size());
  for (const auto& [dist, idx] : by_distance) kept.push_back(idx);
  std::sort(kept.begin(), kept.end());  // restore original track order
  return kept;
}

std::vector<Pose> future_of(const AgentTrack& track) {
  return {track.states.begin() + kCurrentStep + 1, track.states.end()};
}

std::vector<Pose> history_of(const AgentTrack& track) {
  return {track.states.begin() + kCurrentStep + 1 - kHistorySteps,
          track.states.begin() + kCurrentStep + 1};
}

std::vector<Scenario> split_windows(const MapModel& map,
                                    const std::vector<AgentTrack>& raw_tracks,
                                    int av_index, int history_steps, int future_steps,
                                    int stride, int max_agents) {
  if (av_index < 0 || av_index >= static_cast<int>(raw_tracks.size()))
    throw ValidationError("av_index out of range");
  if (stride < 1) throw ValidationError("stride must be >= 1");
  std::size_t window = static_cast<std::size_t>(history_steps + future_steps + 1);
  std::size_t track_len = raw_tracks[static_cast<std::size_t>(av_index)].states.size();
  for (const AgentTrack& t : raw_tracks) {
    if (t.states.size() != track_len)
      throw ValidationError("raw tracks do not share one clock");
  }
  if (track_len < window)
    throw TooShort("track of " + std::to_string(track_len) +
                   " steps cannot fit a " + std::to_string(window) + "-step window");

  std::vector<Scenario> out;
  for (std::size_t start = 0; start + window <= track_len;
       start += static_cast<std::size_t>(stride)) {
    Scenario sc;
    sc.map = map;
    AgentTrack av = raw_tracks[static_cast<std::size_t>(av_index)];
    av.states.assign(av.states.begin() + static_cast<std::ptrdiff_t>(start),
                     av.states.begin() + static_cast<std::ptrdiff_t>(start + window));
    bool av_ok = std::all_of(av.states.begin(), av.states.end(), finite_pose);
    if (!av_ok) continue;  // a window without its AV is no scenario at all
    sc.agents.push_back(std::move(av));
    sc.av_index = 0;

    for (std::size_t i = 0; i < raw_tracks.size(); ++i) {
      if (static_cast<int>(i) == av_index) continue;
      AgentTrack cut = raw_tracks[i];
      cut.states.assign(cut.states.begin() + static_cast<std::ptrdiff_t>(start),
                        cut.states.begin() + static_cast<std::ptrdiff_t>(start + window));
      if (!std::all_of(cut.states.begin(), cut.states.end(), finite_pose))
        continue;  // absent for part of the window -> dropped
      sc.agents.push_back(std::move(cut));
    }
    std::vector<int> kept = select_predicted_agents(sc, max_agents);
    std::vector<AgentTrack> trimmed;
    trimmed.push_back(sc.agents[0]);
    for (int idx : kept) trimmed.push_back(sc.agents[static_cast<std::size_t>(idx)]);
    sc.agents = std::move(trimmed);
    out.push_back(std::move(sc));
  }
  if (out.empty()) throw TooShort("no window survived track validity filtering");
  return out;
}

std::vector<Scenario> filter_for_irl(const std::vector<Scenario>& scenarios) {
  std::vector<Scenario> kept;
  for (const Scenario& sc : scenarios) {
    const auto& states = sc.av().states;
    double mean = std::accumulate(states.begin(), states.end(), 0.0,
                                  [](double acc, const Pose& p) { return acc + p.speed; }) /
                  static_cast<double>(states.size());
    if (mean < 3.0) continue;  // strict: exactly 3 m/s is retained
    kept.push_back(sc);
  }
  return kept;
}

}  // namespace plankit
