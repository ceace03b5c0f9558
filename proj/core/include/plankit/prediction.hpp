#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plankit/behavior.hpp"
#include "plankit/idm.hpp"
#include "plankit/scenario.hpp"

namespace plankit {

enum class PredictorBackend { kCtrv, kIdmReactive, kLearned, kOracle };
enum class FusionMode { kEarly, kLate };

std::string to_string(PredictorBackend backend);
PredictorBackend backend_from_string(const std::string& name);
std::string to_string(FusionMode fusion);
FusionMode fusion_from_string(const std::string& name);

// Per-step Gaussian over an agent position; correlation is fixed at 0.
struct GaussianParams {
  double mu_x = 0.0;
  double sigma_x = 1.0;
  double mu_y = 0.0;
  double sigma_y = 1.0;
};

inline constexpr double kSigmaFloor = 1e-2;
inline constexpr double kSigmaCeil = 1e2;
// Reactive agents ignore leaders more than this far ahead (bumper gap).
inline constexpr double kLeaderSensingRange = 100.0;

// K-mode GMM over the joint futures of the predicted agents.
struct PredictedFutures {
  std::vector<int> agent_indices;  // scenario track indices, AV excluded
  // modes[k][agent][t] — shape (K, agents, kFutureSteps)
  std::vector<std::vector<std::vector<GaussianParams>>> modes;
  std::vector<double> mode_probs;  // K entries, sum to 1

  std::size_t num_agents() const { return agent_indices.size(); }
};

struct PredictorConfig {
  PredictorBackend backend = PredictorBackend::kCtrv;
  FusionMode fusion = FusionMode::kEarly;
  int num_modes = 3;    // K
  int max_agents = 10;  // N
  int embed_dim = 32;   // desk-scale stand-in for the full-size width
  std::uint64_t rng_seed = 0;
};

struct CmpModelParams;  // learned-backend parameters (cmp_model.hpp)

// Closed-form constant-turn-rate-and-velocity rollout; |turn_rate| < 1e-4
// falls back to the straight-line limit.
std::vector<Pose> ctrv_rollout(const Pose& start, double turn_rate, int steps,
                               double dt);

// Joint plan-reactive IDM rollout of the selected agents: each agent follows
// its nearest lane and brakes for the closest leader, where the AV's planned
// state at step t is a candidate leader. Agents without a projectable lane
// fall back to CTRV. Returns one pose sequence per selected agent.
std::vector<std::vector<Pose>> idm_reactive_rollout(const Scenario& scenario,
                                                    const std::vector<Pose>& plan_states,
                                                    const std::vector<int>& agent_indices,
                                                    const IdmParams& idm = {});

// Predict the selected agents' futures conditioned on one AV plan.
// Throws MissingParams when backend == learned and params is null.
PredictedFutures predict(const Scenario& scenario, const TrajectoryProposal& plan,
                         const PredictorConfig& cfg,
                         const CmpModelParams* params = nullptr);

// Batched prediction over many plans; elementwise identical to mapping
// predict() over the list (the learned backend shares one context encoding).
std::vector<PredictedFutures> predict_batch(const Scenario& scenario,
                                            const std::vector<TrajectoryProposal>& plans,
                                            const PredictorConfig& cfg,
                                            const CmpModelParams* params = nullptr);

}  // namespace plankit
