#pragma once

#include <cmath>

namespace plankit {

// Timing grid shared by the whole pipeline: 10 Hz data, 2 s of history,
// 5 s of future. A stored track is history + current + future.
inline constexpr double kDt = 0.1;
inline constexpr int kHistorySteps = 20;
inline constexpr int kFutureSteps = 50;
inline constexpr int kTrackSteps = kHistorySteps + kFutureSteps + 1;
inline constexpr int kCurrentStep = kHistorySteps;
inline constexpr double kHorizonSeconds = kFutureSteps * kDt;

// One timed sample of a moving object.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

// Wrap to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a <= 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

// Interpolate between two angles along the short way.
inline double lerp_angle(double a, double b, double t) {
  return a + t * wrap_angle(b - a);
}

}  // namespace plankit
