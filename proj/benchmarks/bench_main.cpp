#include <benchmark/benchmark.h>

#include "plankit/behavior.hpp"
#include "plankit/cmp_model.hpp"
#include "plankit/features.hpp"
#include "plankit/pipeline.hpp"
#include "plankit/prediction.hpp"
#include "plankit/synth.hpp"

namespace {

using namespace plankit;

const Scenario& bench_scenario() {
  static const Scenario scenario = synthesize_scenarios(ScenarioTemplate::kCutIn, 1, 11)[0];
  return scenario;
}

struct LearnedSetup {
  Scenario scenario = bench_scenario();
  ReferencePath path = av_reference_path(scenario);
  std::vector<TrajectoryProposal> proposals = generate_proposals(scenario, path);
  PredictorConfig cfg;
  CmpModelParams params;

  LearnedSetup() {
    cfg.backend = PredictorBackend::kLearned;
    params = init_cmp_params(cfg, 5);
  }
};

void BM_QuarticSolve(benchmark::State& state) {
  for (auto _ : state) {
    auto lon = solve_quartic({0.0, 10.0, 0.5}, {12.0, 0.0}, kHorizonSeconds);
    benchmark::DoNotOptimize(lon);
  }
}
BENCHMARK(BM_QuarticSolve);

void BM_QuinticSolve(benchmark::State& state) {
  for (auto _ : state) {
    auto lat = solve_quintic({0.2, 0.1, 0.0}, {3.5, 0.0, 0.0}, kHorizonSeconds);
    benchmark::DoNotOptimize(lat);
  }
}
BENCHMARK(BM_QuinticSolve);

void BM_ProposalGeneration(benchmark::State& state) {
  const Scenario& scenario = bench_scenario();
  ReferencePath path = av_reference_path(scenario);
  for (auto _ : state) {
    auto proposals = generate_proposals(scenario, path);
    benchmark::DoNotOptimize(proposals);
  }
}
BENCHMARK(BM_ProposalGeneration);

void BM_CollisionIndicator(benchmark::State& state) {
  Pose a{0.0, 0.0, 0.3, 0.0};
  Pose b{3.0, 1.0, -0.2, 0.0};
  for (auto _ : state) {
    bool hit = collision_indicator(a, 4.8, 2.0, b, 4.5, 1.9, {});
    benchmark::DoNotOptimize(hit);
  }
}
BENCHMARK(BM_CollisionIndicator);

void BM_PredictSingle(benchmark::State& state) {
  LearnedSetup s;
  for (auto _ : state) {
    std::vector<PredictedFutures> futures;
    futures.reserve(s.proposals.size());
    for (const auto& p : s.proposals)
      futures.push_back(predict(s.scenario, p, s.cfg, &s.params));
    benchmark::DoNotOptimize(futures);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.proposals.size()));
}
BENCHMARK(BM_PredictSingle);

void BM_PredictBatch(benchmark::State& state) {
  LearnedSetup s;
  for (auto _ : state) {
    auto futures = predict_batch(s.scenario, s.proposals, s.cfg, &s.params);
    benchmark::DoNotOptimize(futures);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(s.proposals.size()));
}
BENCHMARK(BM_PredictBatch);

void BM_FeatureExtraction(benchmark::State& state) {
  const Scenario& scenario = bench_scenario();
  ReferencePath path = av_reference_path(scenario);
  auto proposals = generate_proposals(scenario, path);
  PredictorConfig cfg;
  cfg.backend = PredictorBackend::kIdmReactive;
  auto futures = predict_batch(scenario, proposals, cfg, nullptr);
  for (auto _ : state) {
    for (std::size_t i = 0; i < proposals.size(); ++i) {
      FeatureVector f = compute_features(scenario, proposals[i], futures[i], path);
      benchmark::DoNotOptimize(f);
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(proposals.size()));
}
BENCHMARK(BM_FeatureExtraction);

}  // namespace

BENCHMARK_MAIN();
