#pragma once

#include <array>
#include <vector>

#include "plankit/geometry.hpp"
#include "plankit/scenario.hpp"

namespace plankit {

// s(tau) = a0 + a1 tau + a2 tau^2 + a3 tau^3 + a4 tau^4, valid on [0, T].
struct LongitudinalCoeffs {
  std::array<double, 5> a{};
  double duration = 0.0;

  double position(double tau) const;
  double velocity(double tau) const;
  double acceleration(double tau) const;
  double jerk(double tau) const;
};

// d(tau) = b0 + ... + b5 tau^5, valid on [0, T].
struct LateralCoeffs {
  std::array<double, 6> b{};
  double duration = 0.0;

  double position(double tau) const;
  double velocity(double tau) const;
  double acceleration(double tau) const;
  double jerk(double tau) const;
};

enum class Maneuver { kKeep, kChangeLeft, kChangeRight };

std::string to_string(Maneuver m);

// One candidate AV behavior: Frenet polynomials sampled at dt over the
// 5 s horizon and converted to Cartesian poses.
struct TrajectoryProposal {
  std::vector<Pose> states;               // exactly kFutureSteps entries
  std::vector<FrenetState> frenet_states; // matching Frenet samples
  LongitudinalCoeffs lon;
  LateralCoeffs lat;
  double target_speed = 0.0;
  double target_lateral_offset = 0.0;
  Maneuver maneuver = Maneuver::kKeep;
};

struct BehaviorTarget {
  double speed = 0.0;
  double lateral_offset = 0.0;
  Maneuver maneuver = Maneuver::kKeep;
};

inline constexpr int kSpeedTargets = 10;

// Quartic with full initial state and free terminal position:
// boundary conditions s(0), s'(0), s''(0), s'(T), s''(T).
LongitudinalCoeffs solve_quartic(const std::array<double, 3>& init,
                                 const std::array<double, 2>& target, double T);

// Quintic with both endpoints fully constrained.
LateralCoeffs solve_quintic(const std::array<double, 3>& init,
                            const std::array<double, 3>& target, double T);

// Cross product of 10 terminal speeds (evenly spaced over [0, speed limit])
// with the reachable lateral offsets: keep lane, plus the center-to-center
// distance to each adjacent lane. Keep-lane targets come first, speeds
// ascending, so the first target from rest is the all-zero stop proposal.
std::vector<BehaviorTarget> enumerate_targets(const ReferencePath& path,
                                              const Scenario& scenario);

// One proposal per target. Candidates that hit the curvature singularity or
// run past the end of the reference path are dropped; negative longitudinal
// speeds are clamped to rest from the first zero crossing onward.
// Throws NoValidProposal when nothing survives.
std::vector<TrajectoryProposal> generate_proposals(const Scenario& scenario,
                                                   const ReferencePath& path);

}  // namespace plankit
