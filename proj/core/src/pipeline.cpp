#include "plankit/pipeline.hpp"

#include <fstream>

#include "plankit/errors.hpp"

namespace plankit {

ReferencePath av_reference_path(const Scenario& scenario) {
  const Pose& av = scenario.av().current();
  const Lane& lane = scenario.map.lanes[nearest_lane(scenario.map, av.x, av.y)];
  return build_reference_path(lane.centerline, lane.speed_limit);
}

PlanResult plan_scenario(const Scenario& scenario, const PlannerConfig& cfg,
                         const CmpModelParams* params) {
  PlanResult result;
  result.path = av_reference_path(scenario);
  result.proposals = generate_proposals(scenario, result.path);

  if (cfg.batched_inference) {
    result.futures = predict_batch(scenario, result.proposals, cfg.predictor, params);
  } else {
    result.futures.reserve(result.proposals.size());
    for (const TrajectoryProposal& p : result.proposals)
      result.futures.push_back(predict(scenario, p, cfg.predictor, params));
  }

  result.features.reserve(result.proposals.size());
  for (std::size_t i = 0; i < result.proposals.size(); ++i)
    result.features.push_back(compute_features(scenario, result.proposals[i],
                                               result.futures[i], result.path,
                                               cfg.features));
  result.scored = select_behavior(cfg.weights, result.features);
  return result;
}

namespace {

// Prediction quality is measured with the recorded AV future as the plan, so
// the conditional backends see what the AV actually did.
PredictionMetrics truth_conditioned_prediction(const Scenario& scenario,
                                               const PlannerConfig& cfg,
                                               const CmpModelParams* params) {
  TrajectoryProposal truth_plan;
  truth_plan.states = future_of(scenario.av());
  PredictedFutures futures = predict(scenario, truth_plan, cfg.predictor, params);
  std::vector<std::vector<Pose>> truth;
  truth.reserve(futures.agent_indices.size());
  for (int idx : futures.agent_indices)
    truth.push_back(future_of(scenario.agents[static_cast<std::size_t>(idx)]));
  return prediction_metrics(futures, truth);
}

}  // namespace

EvalReport evaluate_planner(const std::vector<Scenario>& dataset, const PlannerConfig& cfg,
                            const CmpModelParams* params, std::vector<ScenarioRow>* rows) {
  if (dataset.empty()) throw ValidationError("evaluate_planner: empty dataset");

  EvalReport report;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Scenario& scenario = dataset[i];
    PlanResult plan = plan_scenario(scenario, cfg, params);
    PlanningMetrics pm = planning_metrics(plan.proposals, plan.scored.order, scenario,
                                          plan.path, cfg.thresholds);
    PredictionMetrics pred = truth_conditioned_prediction(scenario, cfg, params);

    report.plan_min_fde += pm.plan_min_fde;
    report.top3_accuracy += pm.top3_hit ? 1.0 : 0.0;
    report.speed_intent_accuracy += pm.speed_intent_hit ? 1.0 : 0.0;
    report.lane_intent_accuracy += pm.lane_intent_hit ? 1.0 : 0.0;
    report.min_ade += pred.min_ade;
    report.min_fde += pred.min_fde;
    if (rows)
      rows->push_back({static_cast<int>(i), pm.plan_min_fde, pm.top3_hit,
                       pm.speed_intent_hit, pm.lane_intent_hit, pred.min_ade,
                       pred.min_fde});
  }
  double n = static_cast<double>(dataset.size());
  report.plan_min_fde /= n;
  report.top3_accuracy /= n;
  report.speed_intent_accuracy /= n;
  report.lane_intent_accuracy /= n;
  report.min_ade /= n;
  report.min_fde /= n;
  report.scenario_count = static_cast<int>(dataset.size());
  return report;
}

void save_eval_csv(const std::string& path, const EvalReport& report,
                   const std::vector<ScenarioRow>& rows,
                   const MetricThresholds& thresholds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << "# match_radius=" << thresholds.match_radius
      << " speed_deadband=" << thresholds.speed_deadband
      << " lane_halfwidth=" << thresholds.lane_halfwidth << '\n';
  out << "scenario_id,plan_min_fde,top3_hit,speed_hit,lane_hit,min_ade,min_fde\n";
  for (const ScenarioRow& r : rows)
    out << r.scenario_index << ',' << r.plan_min_fde << ',' << (r.top3_hit ? 1 : 0)
        << ',' << (r.speed_intent_hit ? 1 : 0) << ',' << (r.lane_intent_hit ? 1 : 0)
        << ',' << r.min_ade << ',' << r.min_fde << '\n';
  out << "summary," << report.plan_min_fde << ',' << report.top3_accuracy << ','
      << report.speed_intent_accuracy << ',' << report.lane_intent_accuracy << ','
      << report.min_ade << ',' << report.min_fde << '\n';
}

std::vector<LabeledScenario> build_irl_dataset(const std::vector<Scenario>& dataset,
                                               const PlannerConfig& cfg,
                                               const CmpModelParams* params) {
  std::vector<LabeledScenario> out;
  out.reserve(dataset.size());
  for (const Scenario& scenario : dataset) {
    PlanResult plan = plan_scenario(scenario, cfg, params);
    LabeledScenario labeled;
    labeled.features = plan.features;
    labeled.demo_index = label_demo(scenario, plan.proposals);
    out.push_back(std::move(labeled));
  }
  return out;
}

}  // namespace plankit
