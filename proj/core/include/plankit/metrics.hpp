#pragma once

#include <vector>

#include "plankit/behavior.hpp"
#include "plankit/geometry.hpp"
#include "plankit/prediction.hpp"
#include "plankit/scenario.hpp"

namespace plankit {

struct PredictionMetrics {
  double min_ade = 0.0;
  double min_fde = 0.0;
};

// Joint displacement errors: per mode, ADE averages the Euclidean error of the
// Gaussian means over all agents and steps, FDE over agents at the final step;
// the minimum over modes is reported.  `truth` holds one pose sequence per
// predicted agent, aligned with futures.agent_indices.
PredictionMetrics prediction_metrics(const PredictedFutures& futures,
                                     const std::vector<std::vector<Pose>>& truth);

struct MetricThresholds {
  double match_radius = 3.0;      // m, endpoint match for top-3 accuracy
  double speed_deadband = 0.5;    // m/s, accelerate/keep/decelerate boundary
  double lane_halfwidth = 1.75;   // m, keep/left/right boundary
  int top_set = 3;
};

enum class SpeedIntent { kAccelerate, kKeep, kDecelerate };
enum class LaneIntent { kKeep, kLeft, kRight };

SpeedIntent classify_speed_intent(double initial_speed, double terminal_speed,
                                  double deadband);
LaneIntent classify_lane_intent(double terminal_offset, double halfwidth);

struct PlanningMetrics {
  double plan_min_fde = 0.0;
  bool top3_hit = false;
  bool speed_intent_hit = false;
  bool lane_intent_hit = false;
};

// `ranking` lists candidate indices best-first.  The ground truth is the AV's
// recorded future; its terminal lateral offset is measured on `path`, the
// same reference the proposals were generated on.
PlanningMetrics planning_metrics(const std::vector<TrajectoryProposal>& proposals,
                                 const std::vector<int>& ranking,
                                 const Scenario& scenario, const ReferencePath& path,
                                 const MetricThresholds& thresholds = {});

struct EvalReport {
  double min_ade = 0.0;
  double min_fde = 0.0;
  double plan_min_fde = 0.0;
  double top3_accuracy = 0.0;
  double speed_intent_accuracy = 0.0;
  double lane_intent_accuracy = 0.0;
  int scenario_count = 0;
};

}  // namespace plankit
