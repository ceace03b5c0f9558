#include "plankit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "plankit/behavior.hpp"
#include "plankit/errors.hpp"
#include "plankit/geometry.hpp"
#include "plankit/idm.hpp"
#include "plankit/rng.hpp"

namespace plankit {

std::string to_string(ScenarioTemplate t) {
  switch (t) {
    case ScenarioTemplate::kCarFollow: return "car_follow";
    case ScenarioTemplate::kCutIn: return "cut_in";
    case ScenarioTemplate::kLaneChange: return "lane_change";
    case ScenarioTemplate::kIntersectionYield: return "intersection_yield";
    case ScenarioTemplate::kCurvedRoad: return "curved_road";
  }
  return "car_follow";
}

ScenarioTemplate template_from_string(const std::string& name) {
  if (name == "car_follow") return ScenarioTemplate::kCarFollow;
  if (name == "cut_in") return ScenarioTemplate::kCutIn;
  if (name == "lane_change") return ScenarioTemplate::kLaneChange;
  if (name == "intersection_yield") return ScenarioTemplate::kIntersectionYield;
  if (name == "curved_road") return ScenarioTemplate::kCurvedRoad;
  throw ValidationError("unknown scenario template '" + name + "'");
}

namespace {

constexpr double kLaneSpacing = 3.5;

MapModel straight_map(int n_lanes, double length, double speed_limit) {
  MapModel map;
  for (int i = 0; i < n_lanes; ++i) {
    Lane lane;
    double y = kLaneSpacing * static_cast<double>(i);
    lane.centerline = {{0.0, y}, {length, y}};
    lane.speed_limit = speed_limit;
    lane.left_neighbor = i + 1 < n_lanes ? i + 1 : -1;  // +y is to the left
    lane.right_neighbor = i > 0 ? i - 1 : -1;
    map.lanes.push_back(std::move(lane));
  }
  return map;
}

// Left-curving arc roads: lane i sits 3.5 m further toward the turn center.
MapModel curved_map(int n_lanes, double radius, double arc_length,
                    double speed_limit) {
  MapModel map;
  for (int i = 0; i < n_lanes; ++i) {
    double r = radius - kLaneSpacing * static_cast<double>(i);
    Lane lane;
    double sweep = arc_length / radius;
    int samples = static_cast<int>(std::ceil(r * sweep)) + 1;
    for (int k = 0; k <= samples; ++k) {
      double phi = sweep * static_cast<double>(k) / samples;
      lane.centerline.emplace_back(r * std::sin(phi), radius - r * std::cos(phi));
    }
    lane.speed_limit = speed_limit;
    lane.left_neighbor = i + 1 < n_lanes ? i + 1 : -1;
    lane.right_neighbor = i > 0 ? i - 1 : -1;
    map.lanes.push_back(std::move(lane));
  }
  return map;
}

MapModel intersection_map(double speed_limit) {
  MapModel map;
  Lane ew;
  ew.centerline = {{-150.0, 0.0}, {150.0, 0.0}};
  ew.speed_limit = speed_limit;
  Lane ns;
  ns.centerline = {{0.0, -150.0}, {0.0, 150.0}};
  ns.speed_limit = speed_limit;
  map.lanes = {ew, ns};
  map.crosswalks.push_back({{-9.0, -4.0}, {-6.0, -4.0}, {-6.0, 4.0}, {-9.0, 4.0}});
  map.crosswalks.push_back({{-4.0, -9.0}, {4.0, -9.0}, {4.0, -6.0}, {-4.0, -6.0}});
  return map;
}

// Closed-loop longitudinal IDM with optional scripted lateral profiles and an
// optional virtual stop line (intersection yielding).
struct SimAgent {
  ReferencePath path;
  double s = 0.0;
  double v = 0.0;
  double desired_speed = 0.0;
  double d = 0.0;
  std::optional<LateralCoeffs> lateral;
  double lateral_start = 0.0;  // seconds into the simulation
  std::optional<double> stop_line_s;
  int yield_until_agent = -1;  // stop line active until this agent clears
  double length = 4.8;
  double width = 2.0;
  std::vector<Pose> states;
};

bool crossing_cleared(const Pose& pose) { return pose.y > 6.0; }

std::vector<AgentTrack> simulate(std::vector<SimAgent>& agents) {
  IdmParams idm;
  for (SimAgent& a : agents) a.states.reserve(kTrackSteps);

  std::vector<Pose> current(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    FrenetState fs{agents[i].s, agents[i].v, 0.0, agents[i].d, 0.0, 0.0};
    current[i] = frenet_to_cartesian(agents[i].path, fs);
  }

  for (std::size_t step = 0; step < kTrackSteps; ++step) {
    double t = static_cast<double>(step) * kDt;
    for (std::size_t i = 0; i < agents.size(); ++i) agents[i].states.push_back(current[i]);
    if (step + 1 == kTrackSteps) break;

    // Synchronous update: accelerations from this step's snapshot.
    std::vector<double> accel(agents.size(), 0.0);
    for (std::size_t i = 0; i < agents.size(); ++i) {
      SimAgent& a = agents[i];
      bool has_leader = false;
      double gap = 0.0, leader_v = 0.0;
      for (std::size_t j = 0; j < agents.size(); ++j) {
        if (j == i) continue;
        FrenetState other;
        try {
          other = cartesian_to_frenet(a.path, current[j]);
        } catch (const Error&) {
          continue;  // off this agent's corridor (e.g. the crossing road)
        }
        if (other.s <= a.s || std::abs(other.d - a.d) >= 1.75) continue;
        double g = (other.s - a.s) - 0.5 * (agents[j].length + a.length);
        if (!has_leader || g < gap) {
          has_leader = true;
          gap = g;
          leader_v = current[j].speed;
        }
      }
      if (a.stop_line_s && a.yield_until_agent >= 0 &&
          !crossing_cleared(current[static_cast<std::size_t>(a.yield_until_agent)])) {
        double g = (*a.stop_line_s - a.s) - 0.5 * a.length;
        if (!has_leader || g < gap) {
          has_leader = true;
          gap = g;
          leader_v = 0.0;
        }
      }
      accel[i] = idm_acceleration(a.v, a.desired_speed, has_leader, gap, leader_v, idm);
    }

    for (std::size_t i = 0; i < agents.size(); ++i) {
      SimAgent& a = agents[i];
      idm_step(a.s, a.v, accel[i], kDt);
      FrenetState fs{a.s, a.v, accel[i], a.d, 0.0, 0.0};
      if (a.lateral) {
        double tau = std::clamp(t + kDt - a.lateral_start, 0.0, a.lateral->duration);
        fs.d = a.lateral->position(tau);
        if (tau > 0.0 && tau < a.lateral->duration) {
          fs.d_dot = a.lateral->velocity(tau);
          fs.d_ddot = a.lateral->acceleration(tau);
        }
        a.d = fs.d;
      }
      current[i] = frenet_to_cartesian(a.path, fs);
    }
  }

  std::vector<AgentTrack> tracks(agents.size());
  for (std::size_t i = 0; i < agents.size(); ++i) {
    tracks[i].id = static_cast<int>(i);
    tracks[i].kind = AgentKind::kVehicle;
    tracks[i].length = agents[i].length;
    tracks[i].width = agents[i].width;
    tracks[i].states = std::move(agents[i].states);
  }
  return tracks;
}

void randomize_box(SimAgent& a, Rng& rng) {
  a.length = rng.uniform(4.3, 5.1);
  a.width = rng.uniform(1.8, 2.1);
}

Scenario make_car_follow(Rng& rng) {
  double limit = rng.uniform(11.0, 15.0);
  Scenario sc;
  sc.map = straight_map(1, 400.0, limit);
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, limit);

  SimAgent av;
  av.path = path;
  av.s = rng.uniform(30.0, 60.0);
  av.v = rng.uniform(5.0, 12.0);
  av.desired_speed = limit;
  randomize_box(av, rng);

  SimAgent leader;
  leader.path = path;
  leader.s = av.s + rng.uniform(15.0, 40.0);
  leader.v = rng.uniform(5.0, 12.0);
  leader.desired_speed = leader.v;
  randomize_box(leader, rng);

  std::vector<SimAgent> agents{av, leader};
  sc.agents = simulate(agents);
  sc.av_index = 0;
  return sc;
}

Scenario make_cut_in(Rng& rng) {
  double limit = rng.uniform(11.0, 15.0);
  Scenario sc;
  sc.map = straight_map(2, 400.0, limit);
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, limit);

  SimAgent av;
  av.path = path;
  av.s = rng.uniform(60.0, 90.0);
  av.v = rng.uniform(8.0, 12.0);
  av.desired_speed = limit;
  randomize_box(av, rng);

  SimAgent follower;
  follower.path = path;
  follower.s = av.s - rng.uniform(12.0, 25.0);
  follower.v = av.v + rng.uniform(-1.0, 2.0);
  follower.desired_speed = follower.v + rng.uniform(0.0, 2.0);
  randomize_box(follower, rng);

  SimAgent cutter;
  cutter.path = path;
  cutter.s = av.s + rng.uniform(8.0, 18.0);
  cutter.v = av.v * rng.uniform(0.7, 0.95);
  cutter.desired_speed = cutter.v;
  cutter.d = kLaneSpacing;
  cutter.lateral_start = rng.uniform(0.5, 2.0);
  cutter.lateral = solve_quintic({kLaneSpacing, 0.0, 0.0}, {0.0, 0.0, 0.0}, 3.0);
  randomize_box(cutter, rng);

  std::vector<SimAgent> agents{av, follower, cutter};
  sc.agents = simulate(agents);
  sc.av_index = 0;
  return sc;
}

Scenario make_lane_change(Rng& rng) {
  double limit = rng.uniform(11.0, 15.0);
  int n_lanes = rng.uniform_int(2, 3);
  Scenario sc;
  sc.map = straight_map(n_lanes, 400.0, limit);
  ReferencePath lane0 = build_reference_path(sc.map.lanes[0].centerline, limit);

  SimAgent av;
  av.path = lane0;
  av.s = rng.uniform(40.0, 70.0);
  av.v = rng.uniform(7.0, 11.0);
  av.desired_speed = limit;
  // The slow leader motivates a change into the (always available) left lane,
  // starting just after the observation window.
  av.lateral_start = rng.uniform(2.2, 3.0);
  av.lateral = solve_quintic({0.0, 0.0, 0.0}, {kLaneSpacing, 0.0, 0.0}, 3.0);
  randomize_box(av, rng);

  SimAgent slow;
  slow.path = lane0;
  slow.s = av.s + rng.uniform(20.0, 35.0);
  slow.v = av.v * rng.uniform(0.4, 0.7);
  slow.desired_speed = slow.v;
  randomize_box(slow, rng);

  std::vector<SimAgent> agents{av, slow};
  if (rng.bernoulli(0.5)) {
    SimAgent trailing;
    trailing.path = lane0;
    // Clamp so a far-back draw cannot spawn before the path start.
    trailing.s = std::max(5.0, av.s - rng.uniform(25.0, 45.0));
    trailing.v = rng.uniform(6.0, 10.0);
    trailing.desired_speed = trailing.v;
    trailing.d = kLaneSpacing;  // rides the target lane
    randomize_box(trailing, rng);
    agents.push_back(trailing);
  }
  sc.agents = simulate(agents);
  sc.av_index = 0;
  return sc;
}

Scenario make_intersection_yield(Rng& rng) {
  double limit = rng.uniform(10.0, 13.0);
  Scenario sc;
  sc.map = intersection_map(limit);
  ReferencePath ew = build_reference_path(sc.map.lanes[0].centerline, limit);
  ReferencePath ns = build_reference_path(sc.map.lanes[1].centerline, limit);

  SimAgent av;
  av.path = ew;
  av.v = rng.uniform(7.0, 10.0);
  // Current step (t = 2 s) lands 28-40 m before the stop line at x = -7.
  av.s = (150.0 - 7.0) - rng.uniform(28.0, 40.0) - av.v * 2.0;
  av.desired_speed = limit;
  av.stop_line_s = 150.0 - 7.0;
  av.yield_until_agent = 1;
  randomize_box(av, rng);

  SimAgent crossing;
  crossing.path = ns;
  crossing.v = rng.uniform(7.0, 11.0);
  double time_to_center = rng.uniform(2.5, 4.5);
  crossing.s = 150.0 - crossing.v * time_to_center;
  crossing.desired_speed = crossing.v;
  randomize_box(crossing, rng);

  std::vector<SimAgent> agents{av, crossing};
  sc.agents = simulate(agents);
  sc.av_index = 0;
  return sc;
}

Scenario make_curved_road(Rng& rng) {
  double limit = rng.uniform(9.0, 13.0);
  double radius = rng.uniform(60.0, 150.0);
  int n_lanes = rng.uniform_int(1, 2);
  Scenario sc;
  sc.map = curved_map(n_lanes, radius, 300.0, limit);
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, limit);

  SimAgent av;
  av.path = path;
  av.s = rng.uniform(40.0, 70.0);
  av.v = rng.uniform(5.0, 10.0);
  av.desired_speed = limit;
  randomize_box(av, rng);

  SimAgent leader;
  leader.path = path;
  leader.s = av.s + rng.uniform(15.0, 35.0);
  leader.v = rng.uniform(5.0, 10.0);
  leader.desired_speed = leader.v;
  randomize_box(leader, rng);

  std::vector<SimAgent> agents{av, leader};
  sc.agents = simulate(agents);
  sc.av_index = 0;
  return sc;
}

}  // namespace

std::vector<Scenario> synthesize_scenarios(ScenarioTemplate tmpl, int count,
                                           std::uint64_t seed) {
  if (count < 1) throw ValidationError("scenario count must be >= 1");
  Rng root(seed);
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng(root.next_seed());
    Scenario sc;
    switch (tmpl) {
      case ScenarioTemplate::kCarFollow: sc = make_car_follow(rng); break;
      case ScenarioTemplate::kCutIn: sc = make_cut_in(rng); break;
      case ScenarioTemplate::kLaneChange: sc = make_lane_change(rng); break;
      case ScenarioTemplate::kIntersectionYield: sc = make_intersection_yield(rng); break;
      case ScenarioTemplate::kCurvedRoad: sc = make_curved_road(rng); break;
    }
    validate_scenario(sc, to_string(tmpl) + " " + std::to_string(k));
    out.push_back(std::move(sc));
  }
  return out;
}

std::vector<Scenario> synthesize_mixed(int count, std::uint64_t seed) {
  if (count < 1) throw ValidationError("scenario count must be >= 1");
  static constexpr ScenarioTemplate kAll[] = {
      ScenarioTemplate::kCarFollow, ScenarioTemplate::kCutIn,
      ScenarioTemplate::kLaneChange, ScenarioTemplate::kIntersectionYield,
      ScenarioTemplate::kCurvedRoad};
  Rng root(seed);
  std::vector<Scenario> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    Rng rng(root.next_seed());
    ScenarioTemplate tmpl = kAll[k % 5];
    Scenario sc;
    switch (tmpl) {
      case ScenarioTemplate::kCarFollow: sc = make_car_follow(rng); break;
      case ScenarioTemplate::kCutIn: sc = make_cut_in(rng); break;
      case ScenarioTemplate::kLaneChange: sc = make_lane_change(rng); break;
      case ScenarioTemplate::kIntersectionYield: sc = make_intersection_yield(rng); break;
      case ScenarioTemplate::kCurvedRoad: sc = make_curved_road(rng); break;
    }
    validate_scenario(sc, to_string(tmpl) + " " + std::to_string(k));
    out.push_back(std::move(sc));
  }
  return out;
}

}  // namespace plankit
