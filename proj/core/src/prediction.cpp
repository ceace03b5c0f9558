#include "plankit/prediction.hpp"

#include <cmath>
#include <map>

#include "plankit/cmp_model.hpp"
#include "plankit/errors.hpp"
#include "plankit/geometry.hpp"

namespace plankit {

std::string to_string(PredictorBackend backend) {
  switch (backend) {
    case PredictorBackend::kCtrv: return "ctrv";
    case PredictorBackend::kIdmReactive: return "idm";
    case PredictorBackend::kLearned: return "learned";
    case PredictorBackend::kOracle: return "oracle";
  }
  return "ctrv";
}

PredictorBackend backend_from_string(const std::string& name) {
  if (name == "ctrv") return PredictorBackend::kCtrv;
  if (name == "idm" || name == "idm_reactive") return PredictorBackend::kIdmReactive;
  if (name == "learned") return PredictorBackend::kLearned;
  if (name == "oracle") return PredictorBackend::kOracle;
  throw ValidationError("unknown predictor backend '" + name + "'");
}

std::string to_string(FusionMode fusion) {
  return fusion == FusionMode::kEarly ? "early" : "late";
}

FusionMode fusion_from_string(const std::string& name) {
  if (name == "early") return FusionMode::kEarly;
  if (name == "late") return FusionMode::kLate;
  throw ValidationError("unknown fusion mode '" + name + "'");
}

std::vector<Pose> ctrv_rollout(const Pose& start, double turn_rate, int steps,
                               double dt) {
  std::vector<Pose> out;
  out.reserve(static_cast<std::size_t>(steps));
  for (int k = 1; k <= steps; ++k) {
    double t = dt * static_cast<double>(k);
    Pose p;
    p.speed = start.speed;
    if (std::abs(turn_rate) < 1e-4) {
      p.x = start.x + start.speed * std::cos(start.heading) * t;
      p.y = start.y + start.speed * std::sin(start.heading) * t;
      p.heading = start.heading;
    } else {
      double h = start.heading + turn_rate * t;
      double r = start.speed / turn_rate;
      p.x = start.x + r * (std::sin(h) - std::sin(start.heading));
      p.y = start.y - r * (std::cos(h) - std::cos(start.heading));
      p.heading = wrap_angle(h);
    }
    out.push_back(p);
  }
  return out;
}

namespace {

double estimate_turn_rate(const AgentTrack& track, double dt) {
  return wrap_angle(track.states[kCurrentStep].heading -
                    track.states[kCurrentStep - 1].heading) /
         dt;
}

// Replicate one joint rollout across all K modes with uniform probabilities
// and floor sigmas.
PredictedFutures single_mode_futures(std::vector<int> agent_indices,
                                     const std::vector<std::vector<Pose>>& rollouts,
                                     int num_modes) {
  PredictedFutures out;
  out.agent_indices = std::move(agent_indices);
  std::vector<std::vector<GaussianParams>> mode(out.agent_indices.size());
  for (std::size_t a = 0; a < rollouts.size(); ++a) {
    mode[a].reserve(rollouts[a].size());
    for (const Pose& p : rollouts[a])
      mode[a].push_back({p.x, kSigmaFloor, p.y, kSigmaFloor});
  }
  out.modes.assign(static_cast<std::size_t>(num_modes), mode);
  out.mode_probs.assign(static_cast<std::size_t>(num_modes),
                        1.0 / static_cast<double>(num_modes));
  return out;
}

}  // namespace

std::vector<std::vector<Pose>> idm_reactive_rollout(const Scenario& scenario,
                                                    const std::vector<Pose>& plan_states,
                                                    const std::vector<int>& agent_indices,
                                                    const IdmParams& idm) {
  struct RolloutAgent {
    const AgentTrack* track = nullptr;
    const ReferencePath* path = nullptr;  // null -> CTRV fallback
    double s = 0.0, d = 0.0, v = 0.0, accel = 0.0;
    std::vector<Pose> ctrv;  // used only by the fallback
    Pose pose;
  };

  // Lane paths are shared between agents on the same lane.
  std::map<std::size_t, ReferencePath> lane_paths;
  std::vector<RolloutAgent> sim(agent_indices.size());
  for (std::size_t a = 0; a < agent_indices.size(); ++a) {
    RolloutAgent& ra = sim[a];
    ra.track = &scenario.agents[static_cast<std::size_t>(agent_indices[a])];
    const Pose& now = ra.track->current();
    ra.pose = now;
    std::size_t lane = nearest_lane(scenario.map, now.x, now.y);
    auto [it, inserted] = lane_paths.try_emplace(lane);
    if (inserted)
      it->second = build_reference_path(scenario.map.lanes[lane].centerline,
                                        scenario.map.lanes[lane].speed_limit);
    try {
      FrenetState fs = cartesian_to_frenet(it->second, now);
      ra.path = &it->second;
      ra.s = fs.s;
      ra.d = fs.d;
      ra.v = now.speed;
    } catch (const Error&) {
      ra.path = nullptr;
      ra.ctrv = ctrv_rollout(now, estimate_turn_rate(*ra.track, kDt), kFutureSteps, kDt);
    }
  }

  const AgentTrack& av = scenario.av();
  std::vector<std::vector<Pose>> out(sim.size());
  for (int t = 0; t < kFutureSteps; ++t) {
    const Pose& av_pose = plan_states[static_cast<std::size_t>(t)];
    // Accelerations from the joint snapshot at step t.
    std::vector<double> accel(sim.size(), 0.0);
    for (std::size_t a = 0; a < sim.size(); ++a) {
      RolloutAgent& ra = sim[a];
      if (!ra.path) continue;
      bool has_leader = false;
      double gap = 0.0, leader_v = 0.0;
      auto consider = [&](const Pose& other, double other_len, double other_speed) {
        FrenetState fo;
        try {
          fo = cartesian_to_frenet(*ra.path, other);
        } catch (const Error&) {
          return;
        }
        if (fo.s <= ra.s || std::abs(fo.d - ra.d) >= 1.75) return;
        double g = (fo.s - ra.s) - 0.5 * (other_len + ra.track->length);
        if (g > kLeaderSensingRange) return;  // beyond sensing: free road
        if (!has_leader || g < gap) {
          has_leader = true;
          gap = g;
          leader_v = other_speed;
        }
      };
      for (std::size_t b = 0; b < sim.size(); ++b) {
        if (b == a) continue;
        consider(sim[b].pose, sim[b].track->length, sim[b].pose.speed);
      }
      consider(av_pose, av.length, av_pose.speed);
      // Desired speed is the agent's speed at prediction start: free agents
      // keep doing what they were doing.
      accel[a] = idm_acceleration(ra.v, ra.track->current().speed, has_leader, gap,
                                  leader_v, idm);
    }
    for (std::size_t a = 0; a < sim.size(); ++a) {
      RolloutAgent& ra = sim[a];
      if (!ra.path) {
        ra.pose = ra.ctrv[static_cast<std::size_t>(t)];
      } else {
        idm_step(ra.s, ra.v, accel[a], kDt);
        if (ra.s > ra.path->length()) {  // ran out of mapped lane: hold at end
          ra.s = ra.path->length();
          ra.v = 0.0;
        }
        ra.pose = frenet_to_cartesian(*ra.path, {ra.s, ra.v, accel[a], ra.d, 0.0, 0.0});
      }
      out[a].push_back(ra.pose);
    }
  }
  return out;
}

PredictedFutures predict(const Scenario& scenario, const TrajectoryProposal& plan,
                         const PredictorConfig& cfg, const CmpModelParams* params) {
  std::vector<int> selected = select_predicted_agents(scenario, cfg.max_agents);
  if (selected.empty()) {
    PredictedFutures out;
    out.modes.resize(static_cast<std::size_t>(cfg.num_modes));
    out.mode_probs.assign(static_cast<std::size_t>(cfg.num_modes),
                          1.0 / static_cast<double>(cfg.num_modes));
    return out;
  }

  switch (cfg.backend) {
    case PredictorBackend::kCtrv: {
      std::vector<std::vector<Pose>> rollouts;
      rollouts.reserve(selected.size());
      for (int idx : selected) {
        const AgentTrack& track = scenario.agents[static_cast<std::size_t>(idx)];
        rollouts.push_back(ctrv_rollout(track.current(), estimate_turn_rate(track, kDt),
                                        kFutureSteps, kDt));
      }
      return single_mode_futures(selected, rollouts, cfg.num_modes);
    }
    case PredictorBackend::kIdmReactive: {
      auto rollouts = idm_reactive_rollout(scenario, plan.states, selected);
      return single_mode_futures(selected, rollouts, cfg.num_modes);
    }
    case PredictorBackend::kOracle: {
      std::vector<std::vector<Pose>> rollouts;
      rollouts.reserve(selected.size());
      for (int idx : selected)
        rollouts.push_back(future_of(scenario.agents[static_cast<std::size_t>(idx)]));
      return single_mode_futures(selected, rollouts, cfg.num_modes);
    }
    case PredictorBackend::kLearned: {
      if (!params)
        throw MissingParams("learned backend requires trained parameters");
      return cmp_forward(scenario, plan.states, cfg, *params);
    }
  }
  throw ValidationError("unhandled predictor backend");
}

std::vector<PredictedFutures> predict_batch(const Scenario& scenario,
                                            const std::vector<TrajectoryProposal>& plans,
                                            const PredictorConfig& cfg,
                                            const CmpModelParams* params) {
  std::vector<PredictedFutures> out;
  out.reserve(plans.size());
  if (cfg.backend == PredictorBackend::kLearned) {
    if (!params)
      throw MissingParams("learned backend requires trained parameters");
    std::vector<int> selected = select_predicted_agents(scenario, cfg.max_agents);
    if (selected.empty()) {
      for (std::size_t i = 0; i < plans.size(); ++i) out.push_back(predict(scenario, plans[i], cfg, params));
      return out;
    }
    std::vector<std::vector<Pose>> plan_states;
    plan_states.reserve(plans.size());
    for (const TrajectoryProposal& p : plans) plan_states.push_back(p.states);
    return cmp_forward_batch(scenario, plan_states, cfg, *params);
  }
  for (const TrajectoryProposal& plan : plans) out.push_back(predict(scenario, plan, cfg, params));
  return out;
}

}  // namespace plankit
