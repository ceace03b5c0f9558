#include <cmath>

#include "doctest.h"
#include "plankit/errors.hpp"
#include "plankit/prediction.hpp"
#include "plankit/synth.hpp"

using namespace plankit;

namespace {

AgentTrack constant_speed_track(int id, double x0, double y, double speed) {
  AgentTrack t;
  t.id = id;
  for (int k = 0; k < kTrackSteps; ++k)
    t.states.push_back({x0 + speed * kDt * static_cast<double>(k), y, 0.0, speed});
  return t;
}

Scenario two_car_scene(double av_x, double av_speed, double other_x,
                       double other_speed) {
  Scenario sc;
  Lane lane;
  for (double x = -50.0; x <= 400.0; x += 5.0) lane.centerline.push_back({x, 0.0});
  lane.speed_limit = 15.0;
  sc.map.lanes.push_back(lane);
  sc.av_index = 0;
  // x arguments position the current step, not the track start.
  sc.agents.push_back(constant_speed_track(0, av_x - av_speed * kDt * kCurrentStep,
                                           0.0, av_speed));
  sc.agents.push_back(constant_speed_track(1, other_x - other_speed * kDt * kCurrentStep,
                                           0.0, other_speed));
  return sc;
}

std::vector<Pose> constant_plan(const Pose& start, double speed) {
  std::vector<Pose> out;
  for (int k = 1; k <= kFutureSteps; ++k)
    out.push_back({start.x + speed * kDt * static_cast<double>(k), start.y, 0.0, speed});
  return out;
}

std::vector<Pose> braking_plan(const Pose& start) {
  // Linear ramp from the current speed to rest over the horizon.
  std::vector<Pose> out;
  double x = start.x, v = start.speed;
  double decel = start.speed / kHorizonSeconds;
  for (int k = 1; k <= kFutureSteps; ++k) {
    double v_next = std::max(0.0, v - decel * kDt);
    x += 0.5 * (v + v_next) * kDt;
    v = v_next;
    out.push_back({x, start.y, 0.0, v});
  }
  return out;
}

}  // namespace

TEST_SUITE("prediction") {

TEST_CASE("zero turn rate rolls out a straight line") {
  Pose start{3.0, -2.0, 0.3, 5.0};
  std::vector<Pose> poses = ctrv_rollout(start, 0.0, kFutureSteps, kDt);
  REQUIRE(poses.size() == static_cast<std::size_t>(kFutureSteps));
  for (int k = 1; k <= kFutureSteps; ++k) {
    double t = kDt * k;
    const Pose& p = poses[static_cast<std::size_t>(k - 1)];
    CHECK(p.x == doctest::Approx(3.0 + 5.0 * std::cos(0.3) * t).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(-2.0 + 5.0 * std::sin(0.3) * t).epsilon(1e-12));
    CHECK(p.heading == doctest::Approx(0.3));
    CHECK(p.speed == doctest::Approx(5.0));
  }
  // Tiny rates collapse to the straight-line limit instead of dividing by ~0.
  std::vector<Pose> tiny = ctrv_rollout(start, 5e-5, kFutureSteps, kDt);
  for (std::size_t k = 0; k < tiny.size(); ++k) {
    CHECK(tiny[k].x == poses[k].x);
    CHECK(tiny[k].y == poses[k].y);
  }
}

TEST_CASE("10 m/s at 0.1 rad/s traces a 100 m circle") {
  Pose start{0.0, 0.0, 0.0, 10.0};
  std::vector<Pose> poses = ctrv_rollout(start, 0.1, kFutureSteps, kDt);
  double r = 100.0;
  for (std::size_t k = 0; k < poses.size(); ++k) {
    double t = kDt * static_cast<double>(k + 1);
    CHECK(std::hypot(poses[k].x - 0.0, poses[k].y - r) == doctest::Approx(r).epsilon(1e-12));
    CHECK(poses[k].x == doctest::Approx(r * std::sin(0.1 * t)).epsilon(1e-12));
    CHECK(poses[k].y == doctest::Approx(r * (1.0 - std::cos(0.1 * t))).epsilon(1e-12));
  }
  // The closed form matches a dt = 1e-3 forward integration of the kinematics.
  double x = 0.0, y = 0.0, h = 0.0;
  std::size_t next = 0;
  for (int i = 1; i <= 5000 && next < poses.size(); ++i) {
    x += 10.0 * std::cos(h) * 1e-3;
    y += 10.0 * std::sin(h) * 1e-3;
    h += 0.1 * 1e-3;
    if (i % 100 == 0) {
      CHECK(std::hypot(x - poses[next].x, y - poses[next].y) < 0.02);
      ++next;
    }
  }
  CHECK(next == poses.size());
}

TEST_CASE("the CTRV backend continues an observed turn") {
  // An agent halfway around a 50 m left turn at 5 m/s.
  double r = 50.0, v = 5.0, omega = v / r;
  Scenario sc = two_car_scene(200.0, 10.0, 0.0, 0.0);
  AgentTrack& turner = sc.agents[1];
  for (int k = 0; k < kTrackSteps; ++k) {
    double t = kDt * static_cast<double>(k);
    turner.states[static_cast<std::size_t>(k)] =
        {r * std::sin(omega * t), r * (1.0 - std::cos(omega * t)), omega * t, v};
  }

  TrajectoryProposal plan;
  plan.states = constant_plan(sc.av().current(), 10.0);
  PredictorConfig cfg;
  cfg.backend = PredictorBackend::kCtrv;
  PredictedFutures fut = predict(sc, plan, cfg);

  REQUIRE(fut.agent_indices == std::vector<int>{1});
  REQUIRE(fut.modes.size() == 3);
  REQUIRE(fut.mode_probs.size() == 3);
  for (double p : fut.mode_probs) CHECK(p == doctest::Approx(1.0 / 3.0));
  double t0 = kDt * kCurrentStep;
  for (int k = 1; k <= kFutureSteps; ++k) {
    const GaussianParams& g = fut.modes[0][0][static_cast<std::size_t>(k - 1)];
    double t = t0 + kDt * static_cast<double>(k);
    CHECK(g.mu_x == doctest::Approx(r * std::sin(omega * t)).epsilon(1e-9));
    CHECK(g.mu_y == doctest::Approx(r * (1.0 - std::cos(omega * t))).epsilon(1e-9));
    CHECK(g.sigma_x == doctest::Approx(kSigmaFloor));
    CHECK(g.sigma_y == doctest::Approx(kSigmaFloor));
  }
  // All modes of a physics backend are copies of the same rollout.
  for (std::size_t k = 0; k < fut.modes[0][0].size(); ++k) {
    CHECK(fut.modes[2][0][k].mu_x == fut.modes[0][0][k].mu_x);
    CHECK(fut.modes[2][0][k].mu_y == fut.modes[0][0][k].mu_y);
  }
}

TEST_CASE("IDM accelerations match hand-evaluated cases") {
  IdmParams p;
  // At the desired speed on a free road the model coasts.
  CHECK(idm_acceleration(10.0, 10.0, false, 0.0, 0.0, p) == doctest::Approx(0.0));
  // From rest on a free road it pulls the full acceleration.
  CHECK(idm_acceleration(0.0, 10.0, false, 0.0, 0.0, p) == doctest::Approx(p.max_accel));
  // Matched speeds at exactly the desired gap: interaction term is -a.
  double desired_gap = p.min_gap + 10.0 * p.time_headway;  // 17 m
  CHECK(idm_acceleration(10.0, 10.0, true, desired_gap, 10.0, p) ==
        doctest::Approx(-p.max_accel));
  // Closing fast from close range brakes much harder than comfort.
  CHECK(idm_acceleration(12.0, 12.0, true, 5.0, 0.0, p) < -4.0);
  // A leader far ahead barely matters.
  CHECK(idm_acceleration(10.0, 10.0, true, 500.0, 10.0, p) ==
        doctest::Approx(0.0).epsilon(1e-2));
}

TEST_CASE("the Euler step clamps at standstill") {
  double s = 0.0, v = 1.0;
  idm_step(s, v, -2.0, 1.0);  // would cross zero at t = 0.5
  CHECK(v == doctest::Approx(0.0));
  CHECK(s == doctest::Approx(0.25));
  s = 0.0;
  v = 5.0;
  idm_step(s, v, 1.0, kDt);
  CHECK(v == doctest::Approx(5.1));
  CHECK(s == doctest::Approx(0.505));
}

TEST_CASE("reactive agents brake harder for a braking plan") {
  Scenario sc = two_car_scene(50.0, 8.0, 20.0, 12.0);
  const Pose& av = sc.av().current();
  std::vector<int> selected = {1};

  std::vector<std::vector<Pose>> keep =
      idm_reactive_rollout(sc, constant_plan(av, av.speed), selected);
  std::vector<std::vector<Pose>> brake =
      idm_reactive_rollout(sc, braking_plan(av), selected);
  REQUIRE(keep.size() == 1);
  REQUIRE(keep[0].size() == static_cast<std::size_t>(kFutureSteps));

  double v_keep = keep[0].back().speed;
  double v_brake = brake[0].back().speed;
  CHECK(v_brake < v_keep);
  // The follower reacts but never reaches the braking AV's final bumper.
  double av_final_x = braking_plan(av).back().x;
  CHECK(brake[0].back().x < av_final_x - 2.0);
}

TEST_CASE("a free follower holds its speed exactly") {
  // The only other car is far behind the AV, so it sees no leader.
  Scenario sc = two_car_scene(200.0, 10.0, 0.0, 12.0);
  std::vector<std::vector<Pose>> out =
      idm_reactive_rollout(sc, constant_plan(sc.av().current(), 10.0), {1});
  const Pose& start = sc.agents[1].current();
  for (int k = 1; k <= kFutureSteps; ++k) {
    const Pose& p = out[0][static_cast<std::size_t>(k - 1)];
    CHECK(p.speed == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(p.x == doctest::Approx(start.x + 12.0 * kDt * k).epsilon(1e-9));
    CHECK(p.y == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("agents off the mapped corridor fall back to CTRV") {
  Scenario sc = two_car_scene(50.0, 8.0, 20.0, 12.0);
  AgentTrack& stray = sc.agents[1];
  for (Pose& p : stray.states) p.y = 30.0;  // beyond any lane's corridor
  std::vector<std::vector<Pose>> out =
      idm_reactive_rollout(sc, constant_plan(sc.av().current(), 8.0), {1});
  const Pose& start = stray.current();
  const Pose& last = out[0].back();
  CHECK(last.x == doctest::Approx(start.x + 12.0 * kHorizonSeconds).epsilon(1e-9));
  CHECK(last.y == doctest::Approx(30.0));
}

TEST_CASE("the oracle backend returns the recorded future") {
  Scenario sc = synthesize_scenarios(ScenarioTemplate::kCutIn, 1, 6)[0];
  TrajectoryProposal plan;
  plan.states = constant_plan(sc.av().current(), sc.av().current().speed);
  PredictorConfig cfg;
  cfg.backend = PredictorBackend::kOracle;
  PredictedFutures fut = predict(sc, plan, cfg);
  REQUIRE(!fut.agent_indices.empty());
  for (std::size_t a = 0; a < fut.num_agents(); ++a) {
    std::vector<Pose> truth =
        future_of(sc.agents[static_cast<std::size_t>(fut.agent_indices[a])]);
    for (std::size_t t = 0; t < truth.size(); ++t) {
      CHECK(fut.modes[0][a][t].mu_x == doctest::Approx(truth[t].x));
      CHECK(fut.modes[0][a][t].mu_y == doctest::Approx(truth[t].y));
    }
  }
}

TEST_CASE("an empty scene predicts nothing but stays well-formed") {
  Scenario sc = two_car_scene(50.0, 8.0, 20.0, 12.0);
  sc.agents.resize(1);  // AV only
  TrajectoryProposal plan;
  plan.states = constant_plan(sc.av().current(), 8.0);
  PredictorConfig cfg;
  PredictedFutures fut = predict(sc, plan, cfg);
  CHECK(fut.num_agents() == 0);
  REQUIRE(fut.mode_probs.size() == 3);
  double sum = 0.0;
  for (double p : fut.mode_probs) sum += p;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("batched physics backends match the per-plan loop exactly") {
  Scenario sc = synthesize_scenarios(ScenarioTemplate::kCutIn, 1, 12)[0];
  std::vector<TrajectoryProposal> plans(3);
  plans[0].states = constant_plan(sc.av().current(), sc.av().current().speed);
  plans[1].states = braking_plan(sc.av().current());
  plans[2].states = constant_plan(sc.av().current(), 2.0);
  for (PredictorBackend backend : {PredictorBackend::kCtrv, PredictorBackend::kIdmReactive,
                                   PredictorBackend::kOracle}) {
    PredictorConfig cfg;
    cfg.backend = backend;
    std::vector<PredictedFutures> batched = predict_batch(sc, plans, cfg);
    REQUIRE(batched.size() == plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
      PredictedFutures single = predict(sc, plans[i], cfg);
      REQUIRE(batched[i].modes.size() == single.modes.size());
      for (std::size_t k = 0; k < single.modes.size(); ++k)
        for (std::size_t a = 0; a < single.modes[k].size(); ++a)
          for (std::size_t t = 0; t < single.modes[k][a].size(); ++t) {
            CHECK(batched[i].modes[k][a][t].mu_x == single.modes[k][a][t].mu_x);
            CHECK(batched[i].modes[k][a][t].mu_y == single.modes[k][a][t].mu_y);
          }
    }
  }
}

TEST_CASE("backend and fusion names round-trip") {
  for (PredictorBackend b : {PredictorBackend::kCtrv, PredictorBackend::kIdmReactive,
                             PredictorBackend::kLearned, PredictorBackend::kOracle})
    CHECK(backend_from_string(to_string(b)) == b);
  CHECK(backend_from_string("idm_reactive") == PredictorBackend::kIdmReactive);
  CHECK_THROWS_AS(backend_from_string("transformer"), ValidationError);
  for (FusionMode f : {FusionMode::kEarly, FusionMode::kLate})
    CHECK(fusion_from_string(to_string(f)) == f);
  CHECK_THROWS_AS(fusion_from_string("mid"), ValidationError);
  CHECK_THROWS_AS(
      [&] {
        Scenario sc = two_car_scene(50.0, 8.0, 20.0, 12.0);
        TrajectoryProposal plan;
        plan.states = constant_plan(sc.av().current(), 8.0);
        PredictorConfig cfg;
        cfg.backend = PredictorBackend::kLearned;
        predict(sc, plan, cfg, nullptr);
      }(),
      MissingParams);
}

}  // TEST_SUITE
