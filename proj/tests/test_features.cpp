#include <cmath>

#include "doctest.h"
#include "plankit/features.hpp"
#include "plankit/geometry.hpp"
#include "plankit/synth.hpp"

using namespace plankit;

namespace {

Scenario feature_scene() {
  Scenario sc;
  Lane lane;
  for (double x = -50.0; x <= 400.0; x += 5.0) lane.centerline.push_back({x, 0.0});
  lane.speed_limit = 10.0;
  sc.map.lanes.push_back(lane);
  sc.av_index = 0;
  for (int id = 0; id < 2; ++id) {
    AgentTrack t;
    t.id = id;
    double x0 = id == 0 ? 50.0 : 80.0;
    for (int k = 0; k < kTrackSteps; ++k)
      t.states.push_back({x0 + 10.0 * kDt * static_cast<double>(k), 0.0, 0.0, 10.0});
    sc.agents.push_back(std::move(t));
  }
  return sc;
}

// Constant-speed straight-line proposal starting at the AV's current pose.
TrajectoryProposal straight_proposal(const Scenario& sc, const ReferencePath& path,
                                     double speed) {
  TrajectoryProposal p;
  const Pose& av = sc.av().current();
  double s0 = cartesian_to_frenet(path, av).s;
  for (int t = 1; t <= kFutureSteps; ++t) {
    double ds = speed * kDt * static_cast<double>(t);
    p.states.push_back({av.x + ds, 0.0, 0.0, speed});
    p.frenet_states.push_back({s0 + ds, speed, 0.0, 0.0, 0.0, 0.0});
  }
  p.lat = solve_quintic({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, kHorizonSeconds);
  p.lon = solve_quartic({s0, speed, 0.0}, {speed, 0.0}, kHorizonSeconds);
  return p;
}

// K identical modes placing the one predicted agent at a fixed longitudinal
// offset from the AV plan, all uniformly probable.
PredictedFutures offset_futures(const TrajectoryProposal& plan, double dx, double dy,
                                int num_modes = 3) {
  PredictedFutures fut;
  fut.agent_indices = {1};
  std::vector<std::vector<GaussianParams>> mode(1);
  for (const Pose& p : plan.states)
    mode[0].push_back({p.x + dx, kSigmaFloor, p.y + dy, kSigmaFloor});
  fut.modes.assign(static_cast<std::size_t>(num_modes), mode);
  fut.mode_probs.assign(static_cast<std::size_t>(num_modes),
                        1.0 / static_cast<double>(num_modes));
  return fut;
}

std::vector<Eigen::Vector2d> arc_polyline(double radius, double sweep, double step) {
  std::vector<Eigen::Vector2d> pts;
  for (double a = 0.0; a <= sweep; a += step / radius)
    pts.push_back({radius * std::sin(a), radius * (1.0 - std::cos(a))});
  return pts;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("feature names line up with the vector layout") {
  const auto& names = FeatureVector::names();
  REQUIRE(names.size() == 7);
  CHECK(names[0] == "travel");
  CHECK(names[4] == "headway");
  CHECK(names[6] == "safety");
  FeatureVector f;
  f.travel = 1.0;
  f.jerk = 3.0;
  f.safety = 7.0;
  Eigen::Matrix<double, 7, 1> v = f.as_vector();
  CHECK(v(0) == 1.0);
  CHECK(v(2) == 3.0);
  CHECK(v(6) == 7.0);
}

TEST_CASE("a linear speed ramp has exact comfort features") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  TrajectoryProposal p = straight_proposal(sc, path, 10.0);
  for (int t = 0; t < kFutureSteps; ++t) {
    double tau = kDt * static_cast<double>(t + 1);
    p.states[static_cast<std::size_t>(t)].speed = 10.0 - tau;
  }
  FeatureVector out;
  compute_trajectory_features(p, path, 10.0, FeatureConfig{}, out);
  // Differences of a linear profile are exact even at the one-sided ends:
  // acceleration is -1 everywhere, jerk vanishes, and mean |v - v_limit| is
  // the mean of tau over the grid.
  CHECK(out.travel == doctest::Approx(0.255).epsilon(1e-12));
  CHECK(out.acc == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(out.jerk == doctest::Approx(0.0));
  CHECK(out.lat_acc == doctest::Approx(0.0));
}

TEST_CASE("travel measures normalized deviation from the limit") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  FeatureVector at_limit, at_half;
  compute_trajectory_features(straight_proposal(sc, path, 10.0), path, 10.0,
                              FeatureConfig{}, at_limit);
  compute_trajectory_features(straight_proposal(sc, path, 5.0), path, 10.0,
                              FeatureConfig{}, at_half);
  CHECK(at_limit.travel == doctest::Approx(0.0));
  CHECK(at_half.travel == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("the braking quartic peaks near 3 m/s^2") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  TrajectoryProposal p = straight_proposal(sc, path, 10.0);
  LongitudinalCoeffs lon = solve_quartic({0.0, 10.0, 0.0}, {0.0, 0.0}, kHorizonSeconds);
  for (int t = 0; t < kFutureSteps; ++t) {
    double tau = kDt * static_cast<double>(t + 1);
    p.states[static_cast<std::size_t>(t)].speed = lon.velocity(tau);
  }
  FeatureVector out;
  compute_trajectory_features(p, path, 10.0, FeatureConfig{}, out);
  // Analytic max |a| = 3 at t = 2.5, max |j| = 2.4 at the ends (attenuated by
  // the one-sided boundary stencils).
  CHECK(out.acc == doctest::Approx(0.6).epsilon(5e-3));
  CHECK(out.jerk > 0.15);
  CHECK(out.jerk < 0.26);
}

TEST_CASE("curvature drives lateral acceleration on an arc") {
  ReferencePath arc = build_reference_path(arc_polyline(50.0, 2.0, 0.5), 10.0);
  TrajectoryProposal p;
  for (int t = 1; t <= kFutureSteps; ++t) {
    double s = 5.0 + 10.0 * kDt * static_cast<double>(t);
    p.frenet_states.push_back({s, 10.0, 0.0, 0.0, 0.0, 0.0});
    Pose pose = frenet_to_cartesian(arc, p.frenet_states.back());
    p.states.push_back(pose);
  }
  p.lat = solve_quintic({0.0, 0.0, 0.0}, {0.0, 0.0, 0.0}, kHorizonSeconds);
  FeatureVector out;
  compute_trajectory_features(p, arc, 10.0, FeatureConfig{}, out);
  // v^2 / r = 100 / 50 = 2, normalized by 5.
  CHECK(out.lat_acc == doctest::Approx(0.4).epsilon(2.5e-2));
}

TEST_CASE("a leader at bumper contact floors the headway") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  TrajectoryProposal p = straight_proposal(sc, path, 10.0);
  double half_lengths = 0.5 * (4.8 + 4.8);
  PredictedFutures fut = offset_futures(p, half_lengths + 1e-6, 0.0);

  FeatureVector out;
  compute_interaction_features(p, fut, sc, path, FeatureConfig{}, out);
  // gap floors at 0.1 m, AV speed is 10: per-mode headway 0.01, probability
  // mixing keeps it, the 1/K factor divides by 3.
  CHECK(out.headway ==
        doctest::Approx(std::exp(-std::pow(0.01 / 3.0, 2))).epsilon(1e-12));
  // Bumper-to-bumper circles overlap at every one of the 50 steps.
  CHECK(out.safety == doctest::Approx(50.0 / 3.0).epsilon(1e-12));
  // Just past half_lengths is not a side overlap; just inside is one, and
  // with zero lateral gap it saturates the feature.
  CHECK(out.lateral_dist == doctest::Approx(0.0));
  FeatureVector inside;
  compute_interaction_features(p, offset_futures(p, half_lengths - 1e-3, 0.0), sc,
                               path, FeatureConfig{}, inside);
  CHECK(inside.lateral_dist == doctest::Approx(1.0).epsilon(1e-12));

  FeatureConfig raw;
  raw.drop_mode_count_factor = true;
  FeatureVector undivided;
  compute_interaction_features(p, fut, sc, path, raw, undivided);
  CHECK(undivided.headway == doctest::Approx(std::exp(-1e-4)).epsilon(1e-12));
  CHECK(undivided.safety == doctest::Approx(50.0).epsilon(1e-12));
}

TEST_CASE("a fully overlapping prediction maximizes risk") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  TrajectoryProposal p = straight_proposal(sc, path, 10.0);
  PredictedFutures fut = offset_futures(p, 0.0, 0.0);
  FeatureVector out;
  compute_interaction_features(p, fut, sc, path, FeatureConfig{}, out);
  CHECK(out.safety == doctest::Approx(50.0 / 3.0).epsilon(1e-12));
  CHECK(out.lateral_dist == doctest::Approx(1.0).epsilon(1e-12));  // zero gap
  CHECK(out.headway == doctest::Approx(0.0));  // never strictly ahead
}

TEST_CASE("an adjacent-lane agent is a side constraint, not a leader") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  TrajectoryProposal p = straight_proposal(sc, path, 10.0);
  PredictedFutures fut = offset_futures(p, 0.0, 3.5);
  FeatureVector out;
  compute_interaction_features(p, fut, sc, path, FeatureConfig{}, out);
  CHECK(out.headway == doctest::Approx(0.0));
  CHECK(out.safety == doctest::Approx(0.0));
  // Lateral clearance 3.5 - (2 + 2)/2 = 1.5 per mode, mixed down to 0.5.
  CHECK(out.lateral_dist == doctest::Approx(std::exp(-0.25)).epsilon(1e-12));
}

TEST_CASE("modes without a counterpart mix in the no-risk value") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  TrajectoryProposal p = straight_proposal(sc, path, 10.0);
  PredictedFutures fut = offset_futures(p, 4.8, 0.0);
  // Mode 2 sees the agent far behind the AV: no leader there.
  for (auto& g : fut.modes[2][0]) g.mu_x -= 60.0;
  FeatureVector out;
  compute_interaction_features(p, fut, sc, path, FeatureConfig{}, out);
  double mixed = (0.01 + 0.01 + 10.0) / 9.0;
  CHECK(out.headway == doctest::Approx(std::exp(-mixed * mixed)).epsilon(1e-12));
}

TEST_CASE("distant traffic and empty scenes carry no interaction risk") {
  Scenario sc = feature_scene();
  ReferencePath path = build_reference_path(sc.map.lanes[0].centerline, 10.0);
  TrajectoryProposal p = straight_proposal(sc, path, 10.0);

  FeatureVector far;
  compute_interaction_features(p, offset_futures(p, 100.0, 0.0), sc, path,
                               FeatureConfig{}, far);
  CHECK(far.safety == doctest::Approx(0.0));
  CHECK(far.headway < 1e-4);  // a 95 m gap at 10 m/s is essentially free

  PredictedFutures none;
  none.modes.resize(3);
  none.mode_probs.assign(3, 1.0 / 3.0);
  FeatureVector empty;
  empty.headway = 9.0;  // must be overwritten
  compute_interaction_features(p, none, sc, path, FeatureConfig{}, empty);
  CHECK(empty.headway == doctest::Approx(0.0));
  CHECK(empty.lateral_dist == doctest::Approx(0.0));
  CHECK(empty.safety == doctest::Approx(0.0));
}

TEST_CASE("the circle test is strict at the contact distance") {
  FeatureConfig cfg;
  double r = std::hypot(4.8 / 6.0, 1.0);  // per-circle radius of a 4.8 x 2 box
  Pose a{0.0, 0.0, 0.0, 0.0};
  CHECK(collision_indicator(a, 4.8, 2.0, Pose{0.0, 0.0, 0.0, 0.0}, 4.8, 2.0, cfg));
  CHECK(collision_indicator(a, 4.8, 2.0, Pose{3.0, 0.0, 0.0, 0.0}, 4.8, 2.0, cfg));
  CHECK(!collision_indicator(a, 4.8, 2.0, Pose{100.0, 0.0, 0.0, 0.0}, 4.8, 2.0, cfg));
  // Side-by-side at exactly the circle contact distance: strict < says clear.
  CHECK(!collision_indicator(a, 4.8, 2.0, Pose{0.0, 2.0 * r, 0.0, 0.0}, 4.8, 2.0, cfg));
  CHECK(collision_indicator(a, 4.8, 2.0, Pose{0.0, 2.0 * r - 1e-9, 0.0, 0.0}, 4.8, 2.0,
                            cfg));
  // The cover errs on the safe side: these boxes are separated by roughly a
  // meter corner-to-corner, yet the circles still flag contact.
  CHECK(collision_indicator(a, 4.8, 2.0, Pose{5.0, 2.3, 0.5, 0.0}, 4.8, 2.0, cfg));
}

TEST_CASE("compute_features composes both feature groups") {
  Scenario sc = synthesize_scenarios(ScenarioTemplate::kCarFollow, 1, 5)[0];
  const Lane& lane = sc.map.lanes[nearest_lane(sc.map, sc.av().current().x,
                                               sc.av().current().y)];
  ReferencePath path = build_reference_path(lane.centerline, lane.speed_limit);
  std::vector<TrajectoryProposal> proposals = generate_proposals(sc, path);
  PredictorConfig cfg;
  PredictedFutures fut = predict(sc, proposals[0], cfg);
  FeatureVector f = compute_features(sc, proposals[0], fut, path);
  Eigen::Matrix<double, 7, 1> v = f.as_vector();
  for (int i = 0; i < 7; ++i) {
    CHECK(std::isfinite(v(i)));
    CHECK(v(i) >= 0.0);
  }
}

}  // TEST_SUITE
