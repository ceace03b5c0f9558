#include "plankit/metrics.hpp"

#include <cmath>
#include <limits>

#include "plankit/errors.hpp"

namespace plankit {

PredictionMetrics prediction_metrics(const PredictedFutures& futures,
                                     const std::vector<std::vector<Pose>>& truth) {
  PredictionMetrics out;
  std::size_t A = futures.num_agents();
  if (A == 0 || futures.modes.empty()) return out;
  if (truth.size() != A)
    throw ShapeMismatch("prediction_metrics: truth covers " + std::to_string(truth.size()) +
                        " agents, prediction has " + std::to_string(A));

  double min_ade = std::numeric_limits<double>::infinity();
  double min_fde = std::numeric_limits<double>::infinity();
  for (const auto& mode : futures.modes) {
    double ade = 0.0, fde = 0.0;
    std::size_t samples = 0;
    for (std::size_t a = 0; a < A; ++a) {
      if (mode[a].size() != truth[a].size())
        throw ShapeMismatch("prediction_metrics: horizon mismatch for agent " +
                            std::to_string(a));
      for (std::size_t t = 0; t < mode[a].size(); ++t) {
        double e = std::hypot(mode[a][t].mu_x - truth[a][t].x,
                              mode[a][t].mu_y - truth[a][t].y);
        ade += e;
        if (t + 1 == mode[a].size()) fde += e;
      }
      samples += mode[a].size();
    }
    ade /= static_cast<double>(samples);
    fde /= static_cast<double>(A);
    min_ade = std::min(min_ade, ade);
    min_fde = std::min(min_fde, fde);
  }
  out.min_ade = min_ade;
  out.min_fde = min_fde;
  return out;
}

SpeedIntent classify_speed_intent(double initial_speed, double terminal_speed,
                                  double deadband) {
  double delta = terminal_speed - initial_speed;
  if (delta > deadband) return SpeedIntent::kAccelerate;
  if (delta < -deadband) return SpeedIntent::kDecelerate;
  return SpeedIntent::kKeep;
}

LaneIntent classify_lane_intent(double terminal_offset, double halfwidth) {
  if (terminal_offset > halfwidth) return LaneIntent::kLeft;
  if (terminal_offset < -halfwidth) return LaneIntent::kRight;
  return LaneIntent::kKeep;
}

PlanningMetrics planning_metrics(const std::vector<TrajectoryProposal>& proposals,
                                 const std::vector<int>& ranking,
                                 const Scenario& scenario, const ReferencePath& path,
                                 const MetricThresholds& thresholds) {
  if (ranking.empty()) throw ValidationError("planning_metrics: no ranked candidates");
  std::vector<Pose> truth = future_of(scenario.av());
  const Pose& goal = truth.back();
  double initial_speed = scenario.av().current().speed;

  std::size_t top = std::min<std::size_t>(ranking.size(),
                                          static_cast<std::size_t>(thresholds.top_set));
  PlanningMetrics out;
  out.plan_min_fde = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < top; ++r) {
    const auto& states = proposals[static_cast<std::size_t>(ranking[r])].states;
    double fde = std::hypot(states.back().x - goal.x, states.back().y - goal.y);
    out.plan_min_fde = std::min(out.plan_min_fde, fde);
  }
  out.top3_hit = out.plan_min_fde <= thresholds.match_radius;

  double truth_offset = 0.0;
  try {
    truth_offset = cartesian_to_frenet(path, goal).d;
  } catch (const Error&) {
    // goal left the mapped corridor; treat it as lane keeping
  }
  const TrajectoryProposal& best = proposals[static_cast<std::size_t>(ranking[0])];
  out.speed_intent_hit =
      classify_speed_intent(initial_speed, best.states.back().speed,
                            thresholds.speed_deadband) ==
      classify_speed_intent(initial_speed, goal.speed, thresholds.speed_deadband);
  out.lane_intent_hit =
      classify_lane_intent(best.frenet_states.back().d, thresholds.lane_halfwidth) ==
      classify_lane_intent(truth_offset, thresholds.lane_halfwidth);
  return out;
}

}  // namespace plankit
