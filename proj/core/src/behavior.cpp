#include "plankit/behavior.hpp"

#include <cmath>

#include "plankit/errors.hpp"

namespace plankit {

double LongitudinalCoeffs::position(double tau) const {
  return a[0] + tau * (a[1] + tau * (a[2] + tau * (a[3] + tau * a[4])));
}

double LongitudinalCoeffs::velocity(double tau) const {
  return a[1] + tau * (2.0 * a[2] + tau * (3.0 * a[3] + tau * 4.0 * a[4]));
}

double LongitudinalCoeffs::acceleration(double tau) const {
  return 2.0 * a[2] + tau * (6.0 * a[3] + tau * 12.0 * a[4]);
}

double LongitudinalCoeffs::jerk(double tau) const {
  return 6.0 * a[3] + tau * 24.0 * a[4];
}

double LateralCoeffs::position(double tau) const {
  return b[0] +
         tau * (b[1] + tau * (b[2] + tau * (b[3] + tau * (b[4] + tau * b[5]))));
}

double LateralCoeffs::velocity(double tau) const {
  return b[1] + tau * (2.0 * b[2] +
                       tau * (3.0 * b[3] + tau * (4.0 * b[4] + tau * 5.0 * b[5])));
}

double LateralCoeffs::acceleration(double tau) const {
  return 2.0 * b[2] + tau * (6.0 * b[3] + tau * (12.0 * b[4] + tau * 20.0 * b[5]));
}

double LateralCoeffs::jerk(double tau) const {
  return 6.0 * b[3] + tau * (24.0 * b[4] + tau * 60.0 * b[5]);
}

std::string to_string(Maneuver m) {
  switch (m) {
    case Maneuver::kKeep: return "keep";
    case Maneuver::kChangeLeft: return "change_left";
    case Maneuver::kChangeRight: return "change_right";
  }
  return "keep";
}

LongitudinalCoeffs solve_quartic(const std::array<double, 3>& init,
                                 const std::array<double, 2>& target, double T) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw SingularSystem("quartic horizon must be positive and finite");
  for (double v : init)
    if (!std::isfinite(v)) throw SingularSystem("non-finite quartic boundary value");
  for (double v : target)
    if (!std::isfinite(v)) throw SingularSystem("non-finite quartic boundary value");

  LongitudinalCoeffs out;
  out.duration = T;
  out.a[0] = init[0];
  out.a[1] = init[1];
  out.a[2] = 0.5 * init[2];
  // Remaining 2x2 system in (a3, a4) from the terminal velocity and
  // acceleration conditions, solved in closed form.
  double c1 = target[0] - init[1] - init[2] * T;
  double c2 = target[1] - init[2];
  out.a[3] = (3.0 * c1 - c2 * T) / (3.0 * T * T);
  out.a[4] = (c2 * T - 2.0 * c1) / (4.0 * T * T * T);
  return out;
}

LateralCoeffs solve_quintic(const std::array<double, 3>& init,
                            const std::array<double, 3>& target, double T) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw SingularSystem("quintic horizon must be positive and finite");
  for (double v : init)
    if (!std::isfinite(v)) throw SingularSystem("non-finite quintic boundary value");
  for (double v : target)
    if (!std::isfinite(v)) throw SingularSystem("non-finite quintic boundary value");

  LateralCoeffs out;
  out.duration = T;
  out.b[0] = init[0];
  out.b[1] = init[1];
  out.b[2] = 0.5 * init[2];
  double T2 = T * T, T3 = T2 * T, T4 = T3 * T, T5 = T4 * T;
  // Residual endpoint conditions after subtracting the fixed low-order part.
  double sp = target[0] - (out.b[0] + out.b[1] * T + out.b[2] * T2);
  double sv = target[1] - (out.b[1] + 2.0 * out.b[2] * T);
  double sa = target[2] - 2.0 * out.b[2];
  out.b[3] = (20.0 * sp - 8.0 * sv * T + sa * T2) / (2.0 * T3);
  out.b[4] = (-30.0 * sp + 14.0 * sv * T - 2.0 * sa * T2) / (2.0 * T4);
  out.b[5] = (12.0 * sp - 6.0 * sv * T + sa * T2) / (2.0 * T5);
  return out;
}

namespace {

// Center-to-center distance from the point on `from` nearest the AV to the
// neighbor lane's centerline.
double lane_spacing(const MapModel& map, std::size_t from, std::size_t to,
                    const Pose& av) {
  Eigen::Vector2d p(av.x, av.y);
  const Lane& lane = map.lanes[from];
  double best = std::numeric_limits<double>::infinity();
  Eigen::Vector2d anchor = lane.centerline.front();
  for (std::size_t i = 0; i + 1 < lane.centerline.size(); ++i) {
    Eigen::Vector2d a = lane.centerline[i];
    Eigen::Vector2d ab = lane.centerline[i + 1] - a;
    double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    Eigen::Vector2d foot = a + t * ab;
    double d = (foot - p).norm();
    if (d < best) {
      best = d;
      anchor = foot;
    }
  }
  return distance_to_lane(map.lanes[to], anchor.x(), anchor.y());
}

}  // namespace

std::vector<BehaviorTarget> enumerate_targets(const ReferencePath& path,
                                              const Scenario& scenario) {
  const Pose& av = scenario.av().current();
  std::size_t lane_idx = nearest_lane(scenario.map, av.x, av.y);
  const Lane& lane = scenario.map.lanes[lane_idx];

  std::vector<std::pair<double, Maneuver>> offsets{{0.0, Maneuver::kKeep}};
  if (lane.left_neighbor >= 0) {
    double d = lane_spacing(scenario.map, lane_idx,
                            static_cast<std::size_t>(lane.left_neighbor), av);
    offsets.emplace_back(d, Maneuver::kChangeLeft);
  }
  if (lane.right_neighbor >= 0) {
    double d = lane_spacing(scenario.map, lane_idx,
                            static_cast<std::size_t>(lane.right_neighbor), av);
    offsets.emplace_back(-d, Maneuver::kChangeRight);
  }

  std::vector<BehaviorTarget> targets;
  targets.reserve(offsets.size() * kSpeedTargets);
  for (const auto& [offset, maneuver] : offsets) {
    for (int i = 0; i < kSpeedTargets; ++i) {
      double speed =
          path.speed_limit * static_cast<double>(i) / (kSpeedTargets - 1);
      targets.push_back({speed, offset, maneuver});
    }
  }
  return targets;
}

namespace {

// First zero of v on (lo, hi] given v(lo) >= 0 > v(hi), by bisection.
template <typename F>
double find_speed_zero(const F& v, double lo, double hi) {
  for (int iter = 0; iter < 60; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (v(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<TrajectoryProposal> generate_proposals(const Scenario& scenario,
                                                   const ReferencePath& path) {
  const AgentTrack& av = scenario.av();
  const Pose& now = av.current();
  double accel =
      (now.speed - av.states[kCurrentStep - 1].speed) / scenario.timestep_s;
  FrenetState fs0 = cartesian_to_frenet(path, now, accel);

  std::vector<TrajectoryProposal> proposals;
  for (const BehaviorTarget& target : enumerate_targets(path, scenario)) {
    TrajectoryProposal prop;
    prop.target_speed = target.speed;
    prop.target_lateral_offset = target.lateral_offset;
    prop.maneuver = target.maneuver;
    prop.lon = solve_quartic({fs0.s, fs0.s_dot, fs0.s_ddot},
                             {target.speed, 0.0}, kHorizonSeconds);
    prop.lat = solve_quintic({fs0.d, fs0.d_dot, fs0.d_ddot},
                             {target.lateral_offset, 0.0, 0.0}, kHorizonSeconds);

    bool feasible = true;
    double rest_s = 0.0;
    bool at_rest = false;
    double prev_tau = 0.0;
    double prev_heading = now.heading;
    for (int t = 0; t < kFutureSteps && feasible; ++t) {
      double tau = static_cast<double>(t + 1) * kDt;
      FrenetState fs;
      if (!at_rest && prop.lon.velocity(tau) < 0.0) {
        // Braking targets can undershoot standstill; hold at rest from the
        // zero crossing onward.
        double tz = find_speed_zero([&](double x) { return prop.lon.velocity(x); },
                                    prev_tau, tau);
        rest_s = prop.lon.position(tz);
        at_rest = true;
      }
      if (at_rest) {
        fs.s = rest_s;
        fs.s_dot = 0.0;
        fs.s_ddot = 0.0;
      } else {
        fs.s = prop.lon.position(tau);
        fs.s_dot = prop.lon.velocity(tau);
        fs.s_ddot = prop.lon.acceleration(tau);
      }
      fs.d = prop.lat.position(tau);
      fs.d_dot = prop.lat.velocity(tau);
      fs.d_ddot = prop.lat.acceleration(tau);

      if (fs.s < 0.0 || fs.s > path.length() ||
          std::abs(fs.d * path.curvature_at(fs.s)) >= 1.0) {
        feasible = false;
        break;
      }
      Pose pose = frenet_to_cartesian(path, fs);
      // Keep headings continuous across the wrap seam.
      pose.heading = prev_heading + wrap_angle(pose.heading - prev_heading);
      prev_heading = pose.heading;
      prop.states.push_back(pose);
      prop.frenet_states.push_back(fs);
      prev_tau = tau;
    }
    if (feasible) proposals.push_back(std::move(prop));
  }
  if (proposals.empty())
    throw NoValidProposal("every candidate was curvature-singular or off-path");
  return proposals;
}

}  // namespace plankit
