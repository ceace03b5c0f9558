#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "plankit/optim.hpp"
#include "plankit/prediction.hpp"
#include "plankit/scenario.hpp"

namespace plankit {

inline constexpr int kPlanDims = 4;       // x, y, heading, speed
inline constexpr int kMapPoints = 10;     // downsampled reference-path points
inline constexpr double kInputScale = 0.1;
inline constexpr double kOutputScale = 10.0;

// Offsets of each weight block inside the flat parameter vector. Matrices are
// stored column-major. Block order: agent encoder (W1, b1, W2, b2), plan
// encoder (W1p, b1p, W2p, b2p), attention projections (Wq, Wk, Wv), decoder
// (Wd1, bd1, Wd2, bd2), mode head (Wm, bm).
struct CmpLayout {
  int agent_in = 0;   // T_h*4 history + 2*kMapPoints map = 100
  int plan_in = 0;    // T_f*kPlanDims = 200
  int embed = 0;      // E
  int dec_in = 0;     // E (early fusion) or 2E (late fusion)
  int dec_out = 0;    // K * T_f * 4
  int num_modes = 0;  // K
  int w1 = 0, b1 = 0, w2 = 0, b2 = 0;
  int w1p = 0, b1p = 0, w2p = 0, b2p = 0;
  int wq = 0, wk = 0, wv = 0;
  int wd1 = 0, bd1 = 0, wd2 = 0, bd2 = 0;
  int wm = 0, bm = 0;
  int total = 0;
};

CmpLayout make_cmp_layout(const PredictorConfig& cfg);

struct CmpModelParams {
  FusionMode fusion = FusionMode::kEarly;
  int num_modes = 3;
  int embed_dim = 32;
  Eigen::VectorXd flat;
};

// Small random initialization, deterministic in the seed.
CmpModelParams init_cmp_params(const PredictorConfig& cfg, std::uint64_t seed);

// Forward pass of the learned predictor for one plan. The plan enters either
// before the interaction attention (early fusion, added to each agent
// embedding) or at the decoder input (late fusion, concatenated).
// Throws ShapeMismatch if params.flat disagrees with the layout.
PredictedFutures cmp_forward(const Scenario& scenario, const std::vector<Pose>& plan_states,
                             const PredictorConfig& cfg, const CmpModelParams& params);

// Batched forward: the plan-independent agent/map encoding is computed once
// and shared; per-plan work is fusion, attention (early) and decoding only.
std::vector<PredictedFutures> cmp_forward_batch(const Scenario& scenario,
                                                const std::vector<std::vector<Pose>>& plans,
                                                const PredictorConfig& cfg,
                                                const CmpModelParams& params);

// GMM negative log-likelihood: the best mode is the one whose joint means are
// closest to the ground truth in L2 over all agents and steps; the loss is
// the per-point Gaussian NLL at that mode averaged over agents and steps,
// plus -log p of the best mode.
double cmp_loss(const PredictedFutures& pred,
                const std::vector<std::vector<Pose>>& truth_futures,
                int* best_mode_index = nullptr);

// Loss plus analytic gradient w.r.t. every parameter (manual backprop through
// the whole pipeline). truth order matches select_predicted_agents.
double cmp_loss_and_grad(const Scenario& scenario, const std::vector<Pose>& plan_states,
                         const std::vector<std::vector<Pose>>& truth_futures,
                         const PredictorConfig& cfg, const CmpModelParams& params,
                         Eigen::VectorXd& grad);

struct CmpTrainConfig {
  double learning_rate = 2e-4;
  double lr_decay = 0.5;      // multiplied in every decay_epochs epochs
  int decay_epochs = 5;
  int batch_size = 32;
  int steps = 500;
  double grad_clip_norm = 5.0;
  std::uint64_t rng_seed = 0;
};

// First-stage training: the AV's ground-truth future serves as the plan.
// Throws NonFiniteLoss with diagnostics if the loss leaves the reals.
std::pair<CmpModelParams, std::vector<LossPoint>> cmp_train(
    const std::vector<Scenario>& dataset, const PredictorConfig& cfg,
    const CmpTrainConfig& train_cfg);

// Flat binary parameter file: magic, config header, little-endian doubles.
void save_cmp_params(const std::string& path, const PredictorConfig& cfg,
                     const CmpModelParams& params);
std::pair<PredictorConfig, CmpModelParams> load_cmp_params(const std::string& path);

}  // namespace plankit
