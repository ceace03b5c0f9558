#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "plankit/behavior.hpp"
#include "plankit/features.hpp"
#include "plankit/optim.hpp"
#include "plankit/scenario.hpp"

namespace plankit {

// Linear cost over the seven trajectory features.  Lower cost means a more
// expert-like candidate.
struct CostWeights {
  Eigen::Matrix<double, 7, 1> w = Eigen::Matrix<double, 7, 1>::Zero();

  double cost(const FeatureVector& f) const { return w.dot(f.as_vector()); }
};

std::vector<double> proposal_costs(const CostWeights& weights,
                                   const std::vector<FeatureVector>& features);

// Maximum-entropy candidate distribution P_i ∝ exp(-c_i), stabilised with a
// max shift before exponentiation.
std::vector<double> proposal_distribution(const std::vector<double>& costs);

// One training example: the feature rows of every candidate in a scenario
// plus the index of the candidate closest to what the driver actually did.
struct LabeledScenario {
  std::vector<FeatureVector> features;
  int demo_index = 0;
};

// Picks the candidate whose endpoint lies closest (Euclidean distance) to the
// endpoint of the recorded future.  Ties go to the earlier candidate.
int label_demo(const Scenario& scenario, const std::vector<TrajectoryProposal>& proposals);

// Negative log-likelihood of the demonstrated candidates.  `weight_decay`
// adds 0.5 * wd * |w|^2; pass 0 to get the bare NLL.
double irl_loss(const CostWeights& weights, const std::vector<LabeledScenario>& batch,
                double weight_decay = 0.0);

Eigen::Matrix<double, 7, 1> irl_gradient(const CostWeights& weights,
                                         const std::vector<LabeledScenario>& batch,
                                         double weight_decay = 0.0);

struct IrlTrainConfig {
  double lr = 1e-2;
  double lr_decay = 0.9;
  int decay_steps = 50;
  double weight_decay = 1e-2;
  int batch_size = 64;
  int steps = 500;
  std::uint64_t rng_seed = 7;
};

// Adam on the linear weights, starting from zero.  The returned history
// records the bare batch NLL (no decay term) at every step.
std::pair<CostWeights, std::vector<LossPoint>> train_irl(
    const std::vector<LabeledScenario>& data, const IrlTrainConfig& cfg = {});

struct ScoredProposals {
  std::vector<double> costs;
  std::vector<double> probabilities;
  std::vector<int> order;  // ascending cost; ties keep enumeration order
  int best = 0;
};

ScoredProposals select_behavior(const CostWeights& weights,
                                const std::vector<FeatureVector>& features);

// Plain-text weights, one "name value" line per feature in canonical order.
void save_cost_weights(const std::string& path, const CostWeights& weights);
CostWeights load_cost_weights(const std::string& path);

// "step,loss,lr" rows with a header, for plotting training curves.
void save_loss_csv(const std::string& path, const std::vector<LossPoint>& history);

}  // namespace plankit
