#include "plankit/irl.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "plankit/errors.hpp"
#include "plankit/rng.hpp"

namespace plankit {

std::vector<double> proposal_costs(const CostWeights& weights,
                                   const std::vector<FeatureVector>& features) {
  std::vector<double> costs(features.size());
  for (std::size_t i = 0; i < features.size(); ++i) costs[i] = weights.cost(features[i]);
  return costs;
}

std::vector<double> proposal_distribution(const std::vector<double>& costs) {
  if (costs.empty()) throw ValidationError("proposal_distribution: no candidates");
  double m = -costs[0];
  for (double c : costs) m = std::max(m, -c);
  std::vector<double> p(costs.size());
  double z = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i) {
    p[i] = std::exp(-costs[i] - m);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

int label_demo(const Scenario& scenario, const std::vector<TrajectoryProposal>& proposals) {
  if (proposals.empty()) throw ValidationError("label_demo: no candidates");
  const Pose goal = future_of(scenario.av()).back();
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const Pose& end = proposals[i].states.back();
    double dist = std::hypot(end.x - goal.x, end.y - goal.y);
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<int>(i);
    }
  }
  return best;
}

namespace {

double scenario_nll(const CostWeights& weights, const LabeledScenario& s) {
  if (s.features.size() < 2)
    throw DegenerateScenario("labeled scenario needs at least 2 candidates");
  if (s.demo_index < 0 || s.demo_index >= static_cast<int>(s.features.size()))
    throw ValidationError("demo index out of range");
  std::vector<double> costs = proposal_costs(weights, s.features);
  double m = -costs[0];
  for (double c : costs) m = std::max(m, -c);
  double z = 0.0;
  for (double c : costs) z += std::exp(-c - m);
  // -ln P_demo = c_demo + ln sum exp(-c_j)
  return costs[static_cast<std::size_t>(s.demo_index)] + m + std::log(z);
}

}  // namespace

double irl_loss(const CostWeights& weights, const std::vector<LabeledScenario>& batch,
                double weight_decay) {
  if (batch.empty()) throw ValidationError("irl_loss: empty batch");
  double loss = 0.0;
  for (const auto& s : batch) loss += scenario_nll(weights, s);
  loss /= static_cast<double>(batch.size());
  return loss + 0.5 * weight_decay * weights.w.squaredNorm();
}

Eigen::Matrix<double, 7, 1> irl_gradient(const CostWeights& weights,
                                         const std::vector<LabeledScenario>& batch,
                                         double weight_decay) {
  if (batch.empty()) throw ValidationError("irl_gradient: empty batch");
  Eigen::Matrix<double, 7, 1> grad = Eigen::Matrix<double, 7, 1>::Zero();
  for (const auto& s : batch) {
    if (s.features.size() < 2)
      throw DegenerateScenario("labeled scenario needs at least 2 candidates");
    std::vector<double> costs = proposal_costs(weights, s.features);
    std::vector<double> probs = proposal_distribution(costs);
    Eigen::Matrix<double, 7, 1> expect = Eigen::Matrix<double, 7, 1>::Zero();
    for (std::size_t i = 0; i < probs.size(); ++i)
      expect += probs[i] * s.features[i].as_vector();
    // d/dw of -ln P(demo): demonstrated features minus the distribution mean.
    grad += s.features[static_cast<std::size_t>(s.demo_index)].as_vector() - expect;
  }
  grad /= static_cast<double>(batch.size());
  return grad + weight_decay * weights.w;
}

std::pair<CostWeights, std::vector<LossPoint>> train_irl(
    const std::vector<LabeledScenario>& data, const IrlTrainConfig& cfg) {
  if (data.empty()) throw ValidationError("train_irl: no training data");
  for (const auto& s : data) {
    if (s.features.size() < 2)
      throw DegenerateScenario("train_irl: scenario needs at least 2 candidates");
    if (s.demo_index < 0 || s.demo_index >= static_cast<int>(s.features.size()))
      throw ValidationError("train_irl: demo index out of range");
  }

  CostWeights weights;
  Eigen::VectorXd w = weights.w;
  Adam opt(w.size());
  Rng rng(cfg.rng_seed);

  std::vector<int> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();  // force a shuffle on the first step
  int batch_size = std::min<int>(cfg.batch_size, static_cast<int>(data.size()));

  std::vector<LossPoint> history;
  history.reserve(static_cast<std::size_t>(cfg.steps));
  for (int step = 0; step < cfg.steps; ++step) {
    if (cursor + static_cast<std::size_t>(batch_size) > order.size()) {
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1],
                  order[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
      cursor = 0;
    }
    std::vector<LabeledScenario> batch;
    batch.reserve(static_cast<std::size_t>(batch_size));
    for (int i = 0; i < batch_size; ++i)
      batch.push_back(data[static_cast<std::size_t>(order[cursor + static_cast<std::size_t>(i)])]);
    cursor += static_cast<std::size_t>(batch_size);

    CostWeights current;
    current.w = w;
    double nll = irl_loss(current, batch, 0.0);
    if (!std::isfinite(nll)) throw NonFiniteLoss("irl loss diverged at step " + std::to_string(step));
    Eigen::VectorXd grad = irl_gradient(current, batch, cfg.weight_decay);

    double lr = cfg.lr * std::pow(cfg.lr_decay, step / cfg.decay_steps);
    history.push_back({step, nll, lr});
    opt.step(w, grad, lr);
  }
  weights.w = w;
  return {weights, history};
}

ScoredProposals select_behavior(const CostWeights& weights,
                                const std::vector<FeatureVector>& features) {
  if (features.empty()) throw ValidationError("select_behavior: no candidates");
  ScoredProposals out;
  out.costs = proposal_costs(weights, features);
  out.probabilities = proposal_distribution(out.costs);
  out.order.resize(features.size());
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return out.costs[static_cast<std::size_t>(a)] <
                                              out.costs[static_cast<std::size_t>(b)]; });
  out.best = out.order[0];
  return out;
}

void save_cost_weights(const std::string& path, const CostWeights& weights) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  const auto& names = FeatureVector::names();
  out.precision(17);
  for (int i = 0; i < 7; ++i) out << names[static_cast<std::size_t>(i)] << ' ' << weights.w[i] << '\n';
}

CostWeights load_cost_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  CostWeights weights;
  const auto& names = FeatureVector::names();
  std::string line;
  for (int i = 0; i < 7; ++i) {
    if (!std::getline(in, line)) throw ParseError(path + ": expected 7 weight lines");
    std::istringstream ls(line);
    std::string name;
    double value = 0.0;
    if (!(ls >> name >> value) || !std::isfinite(value))
      throw ParseError(path + ": malformed weight line '" + line + "'");
    if (name != names[static_cast<std::size_t>(i)])
      throw ParseError(path + ": expected weight '" + names[static_cast<std::size_t>(i)] +
                       "', found '" + name + "'");
    weights.w[i] = value;
  }
  return weights;
}

void save_loss_csv(const std::string& path, const std::vector<LossPoint>& history) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out.precision(17);
  out << "step,loss,lr\n";
  for (const auto& p : history) out << p.step << ',' << p.loss << ',' << p.lr << '\n';
}

}  // namespace plankit
