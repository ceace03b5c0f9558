#pragma once

#include <string>
#include <vector>

#include "plankit/behavior.hpp"
#include "plankit/cmp_model.hpp"
#include "plankit/features.hpp"
#include "plankit/geometry.hpp"
#include "plankit/irl.hpp"
#include "plankit/metrics.hpp"
#include "plankit/prediction.hpp"
#include "plankit/scenario.hpp"

namespace plankit {

// Reference path for planning: the lane centerline nearest the AV's current
// pose, with that lane's speed limit.
ReferencePath av_reference_path(const Scenario& scenario);

struct PlannerConfig {
  PredictorConfig predictor;
  CostWeights weights;
  FeatureConfig features;
  MetricThresholds thresholds;
  bool batched_inference = true;
};

struct PlanResult {
  ReferencePath path;
  std::vector<TrajectoryProposal> proposals;
  std::vector<PredictedFutures> futures;  // aligned with proposals
  std::vector<FeatureVector> features;    // aligned with proposals
  ScoredProposals scored;
};

// Full single-scenario pass: candidates -> conditional prediction -> features
// -> cost ranking.  `params` is required for the learned predictor.
PlanResult plan_scenario(const Scenario& scenario, const PlannerConfig& cfg,
                         const CmpModelParams* params = nullptr);

struct ScenarioRow {
  int scenario_index = 0;
  double plan_min_fde = 0.0;
  bool top3_hit = false;
  bool speed_intent_hit = false;
  bool lane_intent_hit = false;
  double min_ade = 0.0;
  double min_fde = 0.0;
};

// Runs the planner over the dataset and aggregates planning metrics plus
// prediction metrics conditioned on the AV's recorded future.  Per-scenario
// rows are appended to `rows` when given.
EvalReport evaluate_planner(const std::vector<Scenario>& dataset, const PlannerConfig& cfg,
                            const CmpModelParams* params = nullptr,
                            std::vector<ScenarioRow>* rows = nullptr);

void save_eval_csv(const std::string& path, const EvalReport& report,
                   const std::vector<ScenarioRow>& rows,
                   const MetricThresholds& thresholds);

// One labeled example per scenario, with the demonstration candidate chosen
// by closeness to the recorded AV future.
std::vector<LabeledScenario> build_irl_dataset(const std::vector<Scenario>& dataset,
                                               const PlannerConfig& cfg,
                                               const CmpModelParams* params = nullptr);

}  // namespace plankit
