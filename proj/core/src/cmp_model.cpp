#include "plankit/cmp_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>

#include "plankit/errors.hpp"
#include "plankit/geometry.hpp"
#include "plankit/rng.hpp"

namespace plankit {

CmpLayout make_cmp_layout(const PredictorConfig& cfg) {
  CmpLayout L;
  L.agent_in = kHistorySteps * 4 + 2 * kMapPoints;
  L.plan_in = kFutureSteps * kPlanDims;
  L.embed = cfg.embed_dim;
  L.dec_in = cfg.fusion == FusionMode::kEarly ? cfg.embed_dim : 2 * cfg.embed_dim;
  L.dec_out = cfg.num_modes * kFutureSteps * 4;
  L.num_modes = cfg.num_modes;
  int off = 0;
  auto take = [&off](int n) {
    int at = off;
    off += n;
    return at;
  };
  int E = L.embed;
  L.w1 = take(E * L.agent_in);
  L.b1 = take(E);
  L.w2 = take(E * E);
  L.b2 = take(E);
  L.w1p = take(E * L.plan_in);
  L.b1p = take(E);
  L.w2p = take(E * E);
  L.b2p = take(E);
  L.wq = take(E * E);
  L.wk = take(E * E);
  L.wv = take(E * E);
  L.wd1 = take(E * L.dec_in);
  L.bd1 = take(E);
  L.wd2 = take(L.dec_out * E);
  L.bd2 = take(L.dec_out);
  L.wm = take(L.num_modes * L.dec_in);
  L.bm = take(L.num_modes);
  L.total = off;
  return L;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using CMap = Eigen::Map<const MatrixXd>;
using CVec = Eigen::Map<const VectorXd>;
using MMap = Eigen::Map<MatrixXd>;
using MVec = Eigen::Map<VectorXd>;

struct ParamView {
  CMap W1, W2, W1p, W2p, Wq, Wk, Wv, Wd1, Wd2, Wm;
  CVec b1, b2, b1p, b2p, bd1, bd2, bm;

  ParamView(const VectorXd& f, const CmpLayout& L)
      : W1(f.data() + L.w1, L.embed, L.agent_in),
        W2(f.data() + L.w2, L.embed, L.embed),
        W1p(f.data() + L.w1p, L.embed, L.plan_in),
        W2p(f.data() + L.w2p, L.embed, L.embed),
        Wq(f.data() + L.wq, L.embed, L.embed),
        Wk(f.data() + L.wk, L.embed, L.embed),
        Wv(f.data() + L.wv, L.embed, L.embed),
        Wd1(f.data() + L.wd1, L.embed, L.dec_in),
        Wd2(f.data() + L.wd2, L.dec_out, L.embed),
        Wm(f.data() + L.wm, L.num_modes, L.dec_in),
        b1(f.data() + L.b1, L.embed),
        b2(f.data() + L.b2, L.embed),
        b1p(f.data() + L.b1p, L.embed),
        b2p(f.data() + L.b2p, L.embed),
        bd1(f.data() + L.bd1, L.embed),
        bd2(f.data() + L.bd2, L.dec_out),
        bm(f.data() + L.bm, L.num_modes) {}
};

struct GradView {
  MMap W1, W2, W1p, W2p, Wq, Wk, Wv, Wd1, Wd2, Wm;
  MVec b1, b2, b1p, b2p, bd1, bd2, bm;

  GradView(VectorXd& f, const CmpLayout& L)
      : W1(f.data() + L.w1, L.embed, L.agent_in),
        W2(f.data() + L.w2, L.embed, L.embed),
        W1p(f.data() + L.w1p, L.embed, L.plan_in),
        W2p(f.data() + L.w2p, L.embed, L.embed),
        Wq(f.data() + L.wq, L.embed, L.embed),
        Wk(f.data() + L.wk, L.embed, L.embed),
        Wv(f.data() + L.wv, L.embed, L.embed),
        Wd1(f.data() + L.wd1, L.embed, L.dec_in),
        Wd2(f.data() + L.wd2, L.dec_out, L.embed),
        Wm(f.data() + L.wm, L.num_modes, L.dec_in),
        b1(f.data() + L.b1, L.embed),
        b2(f.data() + L.b2, L.embed),
        b1p(f.data() + L.b1p, L.embed),
        b2p(f.data() + L.b2p, L.embed),
        bd1(f.data() + L.bd1, L.embed),
        bd2(f.data() + L.bd2, L.dec_out),
        bm(f.data() + L.bm, L.num_modes) {}
};

MatrixXd tanh_affine(const CMap& W, const CVec& b, const MatrixXd& X) {
  return (((W * X).colwise() + b).array().tanh()).matrix();
}

// Scene-relative inputs: positions shifted to the AV's current position, then
// positions and speeds scaled by kInputScale.
struct CmpInputs {
  std::vector<int> agent_indices;
  MatrixXd U;       // agent_in x A
  VectorXd cx, cy;  // current positions of the predicted agents
  double ax = 0.0, ay = 0.0;
};

CmpInputs build_inputs(const Scenario& scenario, const PredictorConfig& cfg) {
  CmpInputs in;
  in.agent_indices = select_predicted_agents(scenario, cfg.max_agents);
  const Pose& av = scenario.av().current();
  in.ax = av.x;
  in.ay = av.y;
  std::size_t A = in.agent_indices.size();
  int agent_in = kHistorySteps * 4 + 2 * kMapPoints;
  in.U.resize(agent_in, static_cast<Eigen::Index>(A));
  in.cx.resize(static_cast<Eigen::Index>(A));
  in.cy.resize(static_cast<Eigen::Index>(A));

  std::map<std::size_t, ReferencePath> lane_paths;
  for (std::size_t a = 0; a < A; ++a) {
    const AgentTrack& track =
        scenario.agents[static_cast<std::size_t>(in.agent_indices[a])];
    in.cx(static_cast<Eigen::Index>(a)) = track.current().x;
    in.cy(static_cast<Eigen::Index>(a)) = track.current().y;
    std::vector<Pose> hist = history_of(track);
    for (int t = 0; t < kHistorySteps; ++t) {
      const Pose& p = hist[static_cast<std::size_t>(t)];
      in.U(4 * t + 0, static_cast<Eigen::Index>(a)) = kInputScale * (p.x - in.ax);
      in.U(4 * t + 1, static_cast<Eigen::Index>(a)) = kInputScale * (p.y - in.ay);
      in.U(4 * t + 2, static_cast<Eigen::Index>(a)) = p.heading;
      in.U(4 * t + 3, static_cast<Eigen::Index>(a)) = kInputScale * p.speed;
    }
    std::size_t lane = nearest_lane(scenario.map, track.current().x, track.current().y);
    auto [it, inserted] = lane_paths.try_emplace(lane);
    if (inserted)
      it->second = build_reference_path(scenario.map.lanes[lane].centerline,
                                        scenario.map.lanes[lane].speed_limit);
    const ReferencePath& path = it->second;
    for (int j = 0; j < kMapPoints; ++j) {
      double s = path.length() * static_cast<double>(j) / (kMapPoints - 1);
      Eigen::Vector2d pt = path.point_at(s);
      in.U(kHistorySteps * 4 + 2 * j + 0, static_cast<Eigen::Index>(a)) =
          kInputScale * (pt.x() - in.ax);
      in.U(kHistorySteps * 4 + 2 * j + 1, static_cast<Eigen::Index>(a)) =
          kInputScale * (pt.y() - in.ay);
    }
  }
  return in;
}

VectorXd build_plan_input(const std::vector<Pose>& plan_states, double ax, double ay) {
  if (plan_states.size() != kFutureSteps)
    throw ShapeMismatch("plan must have " + std::to_string(kFutureSteps) + " states, got " +
                        std::to_string(plan_states.size()));
  VectorXd v(kFutureSteps * kPlanDims);
  for (int t = 0; t < kFutureSteps; ++t) {
    const Pose& p = plan_states[static_cast<std::size_t>(t)];
    v(kPlanDims * t + 0) = kInputScale * (p.x - ax);
    v(kPlanDims * t + 1) = kInputScale * (p.y - ay);
    v(kPlanDims * t + 2) = p.heading;
    v(kPlanDims * t + 3) = kInputScale * p.speed;
  }
  return v;
}

VectorXd softmax(const VectorXd& x) {
  VectorXd shifted = x.array() - x.maxCoeff();
  VectorXd e = shifted.array().exp();
  return e / e.sum();
}

// Everything the backward pass needs from one forward evaluation.
struct Tape {
  MatrixXd H1, E;                               // agent encoder
  VectorXd pv, Q1, P;                           // plan encoder
  MatrixXd Etil, Qm, Km, Vm, Alpha, Aout, Z, G, O;
  VectorXd pooled, logits, probs;
};

void forward_context(const ParamView& pv, const MatrixXd& U, Tape& tape) {
  tape.H1 = tanh_affine(pv.W1, pv.b1, U);
  tape.E = tanh_affine(pv.W2, pv.b2, tape.H1);
}

void forward_plan(const ParamView& pv, const VectorXd& plan_vec, Tape& tape) {
  tape.pv = plan_vec;
  tape.Q1 = ((pv.W1p * plan_vec + pv.b1p).array().tanh()).matrix();
  tape.P = ((pv.W2p * tape.Q1 + pv.b2p).array().tanh()).matrix();
}

void forward_decode(const ParamView& pv, const CmpLayout& L, FusionMode fusion,
                    Tape& tape) {
  Eigen::Index A = tape.E.cols();
  tape.Etil = tape.E;
  if (fusion == FusionMode::kEarly) tape.Etil.colwise() += tape.P;

  tape.Qm = pv.Wq * tape.Etil;
  tape.Km = pv.Wk * tape.Etil;
  tape.Vm = pv.Wv * tape.Etil;
  double scale = 1.0 / std::sqrt(static_cast<double>(L.embed));
  MatrixXd S = (tape.Qm.transpose() * tape.Km) * scale;  // (i,j) = q_i . k_j
  tape.Alpha.resize(A, A);
  for (Eigen::Index i = 0; i < A; ++i) {
    Eigen::RowVectorXd row = S.row(i);
    row.array() -= row.maxCoeff();
    Eigen::RowVectorXd e = row.array().exp();
    tape.Alpha.row(i) = e / e.sum();
  }
  MatrixXd Att = tape.Vm * tape.Alpha.transpose();
  tape.Aout = tape.Etil + Att;

  if (fusion == FusionMode::kEarly) {
    tape.Z = tape.Aout;
  } else {
    tape.Z.resize(2 * L.embed, A);
    tape.Z.topRows(L.embed) = tape.Aout;
    tape.Z.bottomRows(L.embed) = tape.P.replicate(1, A);
  }
  tape.G = tanh_affine(pv.Wd1, pv.bd1, tape.Z);
  tape.O = (pv.Wd2 * tape.G).colwise() + pv.bd2;
  tape.pooled = tape.Z.rowwise().mean();
  tape.logits = pv.Wm * tape.pooled + pv.bm;
  tape.probs = softmax(tape.logits);
}

PredictedFutures futures_from_tape(const CmpInputs& in, const CmpLayout& L,
                                   const Tape& tape) {
  PredictedFutures out;
  out.agent_indices = in.agent_indices;
  std::size_t A = in.agent_indices.size();
  out.modes.resize(static_cast<std::size_t>(L.num_modes));
  for (int k = 0; k < L.num_modes; ++k) {
    auto& mode = out.modes[static_cast<std::size_t>(k)];
    mode.resize(A);
    for (std::size_t a = 0; a < A; ++a) {
      mode[a].resize(kFutureSteps);
      for (int t = 0; t < kFutureSteps; ++t) {
        int base = (k * kFutureSteps + t) * 4;
        GaussianParams& gp = mode[a][static_cast<std::size_t>(t)];
        gp.mu_x = in.cx(static_cast<Eigen::Index>(a)) +
                  kOutputScale * tape.O(base + 0, static_cast<Eigen::Index>(a));
        gp.mu_y = in.cy(static_cast<Eigen::Index>(a)) +
                  kOutputScale * tape.O(base + 1, static_cast<Eigen::Index>(a));
        gp.sigma_x = std::clamp(std::exp(tape.O(base + 2, static_cast<Eigen::Index>(a))),
                                kSigmaFloor, kSigmaCeil);
        gp.sigma_y = std::clamp(std::exp(tape.O(base + 3, static_cast<Eigen::Index>(a))),
                                kSigmaFloor, kSigmaCeil);
      }
    }
  }
  out.mode_probs.assign(tape.probs.data(), tape.probs.data() + L.num_modes);
  return out;
}

void check_params(const CmpModelParams& params, const CmpLayout& L) {
  if (params.flat.size() != L.total)
    throw ShapeMismatch("parameter vector has " + std::to_string(params.flat.size()) +
                        " entries, layout needs " + std::to_string(L.total));
}

PredictedFutures empty_scene_futures(const PredictorConfig& cfg) {
  PredictedFutures out;
  out.modes.resize(static_cast<std::size_t>(cfg.num_modes));
  out.mode_probs.assign(static_cast<std::size_t>(cfg.num_modes),
                        1.0 / static_cast<double>(cfg.num_modes));
  return out;
}

}  // namespace

CmpModelParams init_cmp_params(const PredictorConfig& cfg, std::uint64_t seed) {
  CmpLayout L = make_cmp_layout(cfg);
  CmpModelParams params;
  params.fusion = cfg.fusion;
  params.num_modes = cfg.num_modes;
  params.embed_dim = cfg.embed_dim;
  params.flat = VectorXd::Zero(L.total);
  Rng rng(seed);
  auto fill = [&](int offset, int count, int fan_in) {
    double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (int i = 0; i < count; ++i) params.flat(offset + i) = rng.normal() * scale;
  };
  int E = L.embed;
  fill(L.w1, E * L.agent_in, L.agent_in);
  fill(L.w2, E * E, E);
  fill(L.w1p, E * L.plan_in, L.plan_in);
  fill(L.w2p, E * E, E);
  fill(L.wq, E * E, E);
  fill(L.wk, E * E, E);
  fill(L.wv, E * E, E);
  fill(L.wd1, E * L.dec_in, L.dec_in);
  fill(L.wd2, L.dec_out * E, E);
  fill(L.wm, L.num_modes * L.dec_in, L.dec_in);
  return params;
}

PredictedFutures cmp_forward(const Scenario& scenario, const std::vector<Pose>& plan_states,
                             const PredictorConfig& cfg, const CmpModelParams& params) {
  CmpLayout L = make_cmp_layout(cfg);
  check_params(params, L);
  CmpInputs in = build_inputs(scenario, cfg);
  if (in.agent_indices.empty()) return empty_scene_futures(cfg);
  ParamView pv(params.flat, L);
  Tape tape;
  forward_context(pv, in.U, tape);
  forward_plan(pv, build_plan_input(plan_states, in.ax, in.ay), tape);
  forward_decode(pv, L, cfg.fusion, tape);
  return futures_from_tape(in, L, tape);
}

std::vector<PredictedFutures> cmp_forward_batch(const Scenario& scenario,
                                                const std::vector<std::vector<Pose>>& plans,
                                                const PredictorConfig& cfg,
                                                const CmpModelParams& params) {
  CmpLayout L = make_cmp_layout(cfg);
  check_params(params, L);
  CmpInputs in = build_inputs(scenario, cfg);
  std::vector<PredictedFutures> out;
  out.reserve(plans.size());
  if (in.agent_indices.empty()) {
    for (std::size_t i = 0; i < plans.size(); ++i) out.push_back(empty_scene_futures(cfg));
    return out;
  }
  ParamView pv(params.flat, L);
  Tape shared;
  forward_context(pv, in.U, shared);  // plan-independent, encoded once
  for (const std::vector<Pose>& plan : plans) {
    Tape tape;
    tape.H1 = shared.H1;
    tape.E = shared.E;
    forward_plan(pv, build_plan_input(plan, in.ax, in.ay), tape);
    forward_decode(pv, L, cfg.fusion, tape);
    out.push_back(futures_from_tape(in, L, tape));
  }
  return out;
}

double cmp_loss(const PredictedFutures& pred,
                const std::vector<std::vector<Pose>>& truth_futures,
                int* best_mode_index) {
  std::size_t A = pred.num_agents();
  if (truth_futures.size() != A)
    throw ShapeMismatch("truth covers " + std::to_string(truth_futures.size()) +
                        " agents, prediction has " + std::to_string(A));
  std::size_t K = pred.modes.size();

  // Joint best mode: closest to the truth in L2 over all agents and steps.
  int best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    double sq = 0.0;
    for (std::size_t a = 0; a < A; ++a) {
      for (std::size_t t = 0; t < truth_futures[a].size(); ++t) {
        const GaussianParams& g = pred.modes[k][a][t];
        double dx = g.mu_x - truth_futures[a][t].x;
        double dy = g.mu_y - truth_futures[a][t].y;
        sq += dx * dx + dy * dy;
      }
    }
    if (sq < best_sq) {
      best_sq = sq;
      best = static_cast<int>(k);
    }
  }
  if (best_mode_index) *best_mode_index = best;

  double nll = 0.0;
  std::size_t points = 0;
  for (std::size_t a = 0; a < A; ++a) {
    for (std::size_t t = 0; t < truth_futures[a].size(); ++t) {
      const GaussianParams& g = pred.modes[static_cast<std::size_t>(best)][a][t];
      double dx = (g.mu_x - truth_futures[a][t].x) / g.sigma_x;
      double dy = (g.mu_y - truth_futures[a][t].y) / g.sigma_y;
      nll += std::log(g.sigma_x) + std::log(g.sigma_y) + 0.5 * (dx * dx + dy * dy);
      ++points;
    }
  }
  if (points > 0) nll /= static_cast<double>(points);
  return nll - std::log(pred.mode_probs[static_cast<std::size_t>(best)]);
}

double cmp_loss_and_grad(const Scenario& scenario, const std::vector<Pose>& plan_states,
                         const std::vector<std::vector<Pose>>& truth_futures,
                         const PredictorConfig& cfg, const CmpModelParams& params,
                         Eigen::VectorXd& grad) {
  CmpLayout L = make_cmp_layout(cfg);
  check_params(params, L);
  CmpInputs in = build_inputs(scenario, cfg);
  if (in.agent_indices.empty())
    throw DegenerateScenario("cannot train on a scene without predicted agents");
  for (const auto& track : truth_futures) {
    if (track.size() != kFutureSteps)
      throw ShapeMismatch("ground-truth futures must cover " +
                          std::to_string(kFutureSteps) + " steps");
  }
  ParamView pv(params.flat, L);
  Tape tape;
  forward_context(pv, in.U, tape);
  forward_plan(pv, build_plan_input(plan_states, in.ax, in.ay), tape);
  forward_decode(pv, L, cfg.fusion, tape);
  PredictedFutures pred = futures_from_tape(in, L, tape);

  int best = 0;
  double loss = cmp_loss(pred, truth_futures, &best);

  Eigen::Index A = static_cast<Eigen::Index>(in.agent_indices.size());
  double coef = 1.0 / static_cast<double>(A * kFutureSteps);

  // Loss gradient into the decoder outputs (best mode only) and mode logits.
  MatrixXd dO = MatrixXd::Zero(L.dec_out, A);
  for (Eigen::Index a = 0; a < A; ++a) {
    for (int t = 0; t < kFutureSteps; ++t) {
      int base = (best * kFutureSteps + t) * 4;
      const GaussianParams& g =
          pred.modes[static_cast<std::size_t>(best)][static_cast<std::size_t>(a)]
                    [static_cast<std::size_t>(t)];
      const Pose& y = truth_futures[static_cast<std::size_t>(a)][static_cast<std::size_t>(t)];
      double zx = (g.mu_x - y.x) / g.sigma_x;
      double zy = (g.mu_y - y.y) / g.sigma_y;
      dO(base + 0, a) = kOutputScale * coef * zx / g.sigma_x;
      dO(base + 1, a) = kOutputScale * coef * zy / g.sigma_y;
      // d loss / d log-sigma = 1 - z^2, zero where the clamp is active.
      double raw_sx = std::exp(tape.O(base + 2, a));
      double raw_sy = std::exp(tape.O(base + 3, a));
      if (raw_sx > kSigmaFloor && raw_sx < kSigmaCeil)
        dO(base + 2, a) = coef * (1.0 - zx * zx);
      if (raw_sy > kSigmaFloor && raw_sy < kSigmaCeil)
        dO(base + 3, a) = coef * (1.0 - zy * zy);
    }
  }
  VectorXd dlogits = tape.probs;
  dlogits(best) -= 1.0;

  grad = VectorXd::Zero(L.total);
  GradView gv(grad, L);

  // Mode head and pooling.
  gv.Wm += dlogits * tape.pooled.transpose();
  gv.bm += dlogits;
  VectorXd dpooled = pv.Wm.transpose() * dlogits;
  MatrixXd dZ = (dpooled / static_cast<double>(A)).replicate(1, A);

  // Decoder MLP.
  gv.Wd2 += dO * tape.G.transpose();
  gv.bd2 += dO.rowwise().sum();
  MatrixXd dG = pv.Wd2.transpose() * dO;
  MatrixXd dGpre = (dG.array() * (1.0 - tape.G.array().square())).matrix();
  gv.Wd1 += dGpre * tape.Z.transpose();
  gv.bd1 += dGpre.rowwise().sum();
  dZ += pv.Wd1.transpose() * dGpre;

  // Fusion split at the decoder input.
  MatrixXd dAout;
  VectorXd dP = VectorXd::Zero(L.embed);
  if (cfg.fusion == FusionMode::kLate) {
    dAout = dZ.topRows(L.embed);
    dP += dZ.bottomRows(L.embed).rowwise().sum();
  } else {
    dAout = std::move(dZ);
  }

  // Attention with residual.
  MatrixXd dEtil = dAout;
  const MatrixXd& dAtt = dAout;
  MatrixXd dVm = dAtt * tape.Alpha;
  MatrixXd dAlpha = dAtt.transpose() * tape.Vm;
  MatrixXd dS(A, A);
  for (Eigen::Index i = 0; i < A; ++i) {
    double inner = (tape.Alpha.row(i).array() * dAlpha.row(i).array()).sum();
    dS.row(i) = (tape.Alpha.row(i).array() * (dAlpha.row(i).array() - inner)).matrix();
  }
  double scale = 1.0 / std::sqrt(static_cast<double>(L.embed));
  MatrixXd dQm = tape.Km * dS.transpose() * scale;
  MatrixXd dKm = tape.Qm * dS * scale;
  gv.Wq += dQm * tape.Etil.transpose();
  gv.Wk += dKm * tape.Etil.transpose();
  gv.Wv += dVm * tape.Etil.transpose();
  dEtil += pv.Wq.transpose() * dQm;
  dEtil += pv.Wk.transpose() * dKm;
  dEtil += pv.Wv.transpose() * dVm;

  // Early fusion feeds the plan embedding into every agent column.
  MatrixXd dE = dEtil;
  if (cfg.fusion == FusionMode::kEarly) dP += dEtil.rowwise().sum();

  // Plan encoder stack.
  VectorXd dPpre = (dP.array() * (1.0 - tape.P.array().square())).matrix();
  gv.W2p += dPpre * tape.Q1.transpose();
  gv.b2p += dPpre;
  VectorXd dQ1 = pv.W2p.transpose() * dPpre;
  VectorXd dQ1pre = (dQ1.array() * (1.0 - tape.Q1.array().square())).matrix();
  gv.W1p += dQ1pre * tape.pv.transpose();
  gv.b1p += dQ1pre;

  // Agent encoder stack.
  MatrixXd dE2pre = (dE.array() * (1.0 - tape.E.array().square())).matrix();
  gv.W2 += dE2pre * tape.H1.transpose();
  gv.b2 += dE2pre.rowwise().sum();
  MatrixXd dH1 = pv.W2.transpose() * dE2pre;
  MatrixXd dH1pre = (dH1.array() * (1.0 - tape.H1.array().square())).matrix();
  gv.W1 += dH1pre * in.U.transpose();
  gv.b1 += dH1pre.rowwise().sum();

  return loss;
}

std::pair<CmpModelParams, std::vector<LossPoint>> cmp_train(
    const std::vector<Scenario>& dataset, const PredictorConfig& cfg,
    const CmpTrainConfig& train_cfg) {
  if (dataset.empty()) throw ValidationError("training dataset is empty");

  struct Sample {
    const Scenario* scenario;
    std::vector<Pose> plan;
    std::vector<std::vector<Pose>> truth;
  };
  std::vector<Sample> samples;
  for (const Scenario& sc : dataset) {
    std::vector<int> selected = select_predicted_agents(sc, cfg.max_agents);
    if (selected.empty()) continue;
    Sample s;
    s.scenario = &sc;
    s.plan = future_of(sc.av());
    for (int idx : selected)
      s.truth.push_back(future_of(sc.agents[static_cast<std::size_t>(idx)]));
    samples.push_back(std::move(s));
  }
  if (samples.empty())
    throw ValidationError("no scenario in the dataset has agents to predict");

  CmpModelParams params = init_cmp_params(cfg, train_cfg.rng_seed);
  CmpLayout L = make_cmp_layout(cfg);
  Adam adam(L.total);
  Rng rng(train_cfg.rng_seed + 1);

  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  auto shuffle = [&]() {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(
                                  rng.uniform_int(0, static_cast<int>(i) - 1))]);
  };
  shuffle();
  std::size_t cursor = 0;
  int epoch = 0;

  std::vector<LossPoint> history;
  history.reserve(static_cast<std::size_t>(train_cfg.steps));
  VectorXd grad(L.total), sample_grad(L.total);
  for (int step = 0; step < train_cfg.steps; ++step) {
    double lr = train_cfg.learning_rate *
                std::pow(train_cfg.lr_decay, epoch / train_cfg.decay_epochs);
    grad.setZero();
    double batch_loss = 0.0;
    int batch_n = std::min<int>(train_cfg.batch_size, static_cast<int>(samples.size()));
    for (int b = 0; b < batch_n; ++b) {
      if (cursor >= order.size()) {
        cursor = 0;
        ++epoch;
        shuffle();
        lr = train_cfg.learning_rate *
             std::pow(train_cfg.lr_decay, epoch / train_cfg.decay_epochs);
      }
      const Sample& s = samples[order[cursor++]];
      batch_loss += cmp_loss_and_grad(*s.scenario, s.plan, s.truth, cfg, params, sample_grad);
      grad += sample_grad;
    }
    batch_loss /= static_cast<double>(batch_n);
    grad /= static_cast<double>(batch_n);
    if (!std::isfinite(batch_loss))
      throw NonFiniteLoss("prediction training diverged at step " + std::to_string(step) +
                          " (loss " + std::to_string(batch_loss) + ")");
    clip_grad_norm(grad, train_cfg.grad_clip_norm);
    adam.step(params.flat, grad, lr);
    history.push_back({step, batch_loss, lr});
  }
  return {std::move(params), std::move(history)};
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ofstream& out, double d) {
  std::uint64_t v;
  std::memcpy(&v, &d, 8);
  put_u64(out, v);
}

double get_f64(std::ifstream& in) {
  std::uint64_t v = get_u64(in);
  double d;
  std::memcpy(&d, &v, 8);
  return d;
}

constexpr char kParamsMagic[8] = {'P', 'L', 'K', 'P', 'R', 'M', '1', '\n'};

}  // namespace

void save_cmp_params(const std::string& path, const PredictorConfig& cfg,
                     const CmpModelParams& params) {
  CmpLayout L = make_cmp_layout(cfg);
  check_params(params, L);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write(kParamsMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(cfg.backend));
  put_u64(out, static_cast<std::uint64_t>(cfg.fusion));
  put_u64(out, static_cast<std::uint64_t>(cfg.num_modes));
  put_u64(out, static_cast<std::uint64_t>(cfg.max_agents));
  put_u64(out, static_cast<std::uint64_t>(cfg.embed_dim));
  put_u64(out, kHistorySteps);
  put_u64(out, kFutureSteps);
  put_u64(out, kPlanDims);
  put_u64(out, static_cast<std::uint64_t>(params.flat.size()));
  for (Eigen::Index i = 0; i < params.flat.size(); ++i) put_f64(out, params.flat(i));
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::pair<PredictorConfig, CmpModelParams> load_cmp_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kParamsMagic, 8) != 0)
    throw ParseError("'" + path + "' is not a parameter file");
  PredictorConfig cfg;
  cfg.backend = static_cast<PredictorBackend>(get_u64(in));
  cfg.fusion = static_cast<FusionMode>(get_u64(in));
  cfg.num_modes = static_cast<int>(get_u64(in));
  cfg.max_agents = static_cast<int>(get_u64(in));
  cfg.embed_dim = static_cast<int>(get_u64(in));
  std::uint64_t t_h = get_u64(in), t_f = get_u64(in), d_p = get_u64(in);
  if (t_h != kHistorySteps || t_f != kFutureSteps || d_p != kPlanDims)
    throw ShapeMismatch("parameter file was built for different horizons");
  std::uint64_t count = get_u64(in);
  CmpLayout L = make_cmp_layout(cfg);
  if (count != static_cast<std::uint64_t>(L.total))
    throw ShapeMismatch("parameter file holds " + std::to_string(count) +
                        " values, layout needs " + std::to_string(L.total));
  CmpModelParams params;
  params.fusion = cfg.fusion;
  params.num_modes = cfg.num_modes;
  params.embed_dim = cfg.embed_dim;
  params.flat.resize(static_cast<Eigen::Index>(count));
  for (std::uint64_t i = 0; i < count; ++i)
    params.flat(static_cast<Eigen::Index>(i)) = get_f64(in);
  if (!in) throw ParseError("'" + path + "' ended before all parameters were read");
  return {cfg, params};
}

}  // namespace plankit
