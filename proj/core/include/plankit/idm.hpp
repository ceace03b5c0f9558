#pragma once

#include <algorithm>
#include <cmath>

namespace plankit {

// Intelligent-driver-model car-following parameters.
struct IdmParams {
  double min_gap = 2.0;        // s0, m
  double time_headway = 1.5;   // T, s
  double max_accel = 1.5;      // a, m/s^2
  double comfort_decel = 2.0;  // b, m/s^2
  double exponent = 4.0;       // delta
};

// IDM acceleration for a follower at `speed` aiming for `desired_speed`.
// `gap` is the bumper-to-bumper distance to the leader and `leader_speed` its
// speed; pass has_leader = false on a free road.
inline double idm_acceleration(double speed, double desired_speed, bool has_leader,
                               double gap, double leader_speed,
                               const IdmParams& p = {}) {
  double free_term = 0.0;
  if (desired_speed > 0.0)
    free_term = std::pow(std::max(speed, 0.0) / desired_speed, p.exponent);
  double accel = p.max_accel * (1.0 - free_term);
  if (has_leader) {
    double closing = speed - leader_speed;
    double desired_gap = p.min_gap + std::max(0.0, speed * p.time_headway +
                                                       speed * closing /
                                                           (2.0 * std::sqrt(p.max_accel *
                                                                            p.comfort_decel)));
    double safe_gap = std::max(gap, 0.1);
    accel -= p.max_accel * (desired_gap / safe_gap) * (desired_gap / safe_gap);
  }
  return accel;
}

// One forward-Euler step of the longitudinal state, clamped at standstill.
inline void idm_step(double& s, double& speed, double accel, double dt) {
  double next_speed = speed + accel * dt;
  if (next_speed < 0.0) {
    // Stop exactly at the zero crossing within this step.
    double t_stop = accel < 0.0 ? -speed / accel : 0.0;
    s += speed * t_stop + 0.5 * accel * t_stop * t_stop;
    speed = 0.0;
    return;
  }
  s += speed * dt + 0.5 * accel * dt * dt;
  speed = next_speed;
}

}  // namespace plankit
