#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "plankit/common.hpp"

namespace plankit {

enum class AgentKind { kVehicle, kPedestrian, kCyclist };

std::string to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);

// Full physical state of an agent at one timestep.
struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
  double length = 0.0;
  double width = 0.0;
  AgentKind kind = AgentKind::kVehicle;
};

// One agent's motion over the whole scenario window (kTrackSteps poses).
struct AgentTrack {
  int id = 0;
  AgentKind kind = AgentKind::kVehicle;
  double length = 4.8;
  double width = 2.0;
  std::vector<Pose> states;

  const Pose& current() const { return states[kCurrentStep]; }
};

AgentState state_at(const AgentTrack& track, std::size_t step);

struct Lane {
  std::vector<Eigen::Vector2d> centerline;
  double speed_limit = 0.0;
  int left_neighbor = -1;   // lane index, -1 = none
  int right_neighbor = -1;  // lane index, -1 = none
};

struct MapModel {
  std::vector<Lane> lanes;
  std::vector<std::vector<Eigen::Vector2d>> crosswalks;
};

// One 7.1 s window: 2 s history, the current step, 5 s of future, all tracks
// on a shared clock with exactly one AV.
struct Scenario {
  MapModel map;
  std::vector<AgentTrack> agents;
  int av_index = 0;
  double timestep_s = kDt;

  const AgentTrack& av() const { return agents[static_cast<std::size_t>(av_index)]; }
};

// Throws ValidationError describing the first violated invariant.
void validate_scenario(const Scenario& scenario, const std::string& label = {});

// Index of the lane whose centerline is nearest to (x, y).
std::size_t nearest_lane(const MapModel& map, double x, double y);

// Distance from a point to a lane centerline (polyline distance).
double distance_to_lane(const Lane& lane, double x, double y);

// Indices of the up-to-max_agents non-AV agents nearest the AV at the current
// step, in their original track order.
std::vector<int> select_predicted_agents(const Scenario& scenario, int max_agents);

// Ground-truth future of one agent: the kFutureSteps poses after the current step.
std::vector<Pose> future_of(const AgentTrack& track);

// The kHistorySteps most recent observed poses, ending at the current step.
std::vector<Pose> history_of(const AgentTrack& track);

// Cut a long recording into fixed 71-step windows at the given stride.
// Agents with any non-finite sample inside a window are treated as absent and
// dropped; at most max_agents non-AV agents nearest to the AV are retained.
// Throws TooShort when no window fits.
std::vector<Scenario> split_windows(const MapModel& map,
                                    const std::vector<AgentTrack>& raw_tracks,
                                    int av_index, int history_steps, int future_steps,
                                    int stride, int max_agents = 10);

// Drop scenarios whose AV mean speed over the whole window is below 3 m/s.
std::vector<Scenario> filter_for_irl(const std::vector<Scenario>& scenarios);

}  // namespace plankit
