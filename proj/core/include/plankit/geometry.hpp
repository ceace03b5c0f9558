#pragma once

#include <Eigen/Core>
#include <vector>

#include "plankit/common.hpp"

namespace plankit {

// Arc-length parameterized reference path, resampled to <= 1 m spacing.
// Heading and curvature are finite-difference estimates at each waypoint.
struct ReferencePath {
  std::vector<Eigen::Vector2d> waypoints;
  std::vector<double> arclength;  // cumulative, starts at 0, strictly increasing
  std::vector<double> heading;    // rad, tangent direction at each waypoint
  std::vector<double> curvature;  // 1/m, signed (left turn positive)
  double speed_limit = 0.0;       // m/s

  double length() const { return arclength.back(); }

  // Piecewise-linear interpolation along the path. s is clamped to [0, length].
  Eigen::Vector2d point_at(double s) const;
  double heading_at(double s) const;
  double curvature_at(double s) const;

  // Unit tangent of the segment containing s (not angle-interpolated).
  // This is what positions the lateral offset, so the Frenet round trip
  // is exact on the polyline itself.
  Eigen::Vector2d segment_tangent_at(double s) const;
};

// Longitudinal/lateral state relative to a reference path.
struct FrenetState {
  double s = 0.0;
  double s_dot = 0.0;
  double s_ddot = 0.0;
  double d = 0.0;
  double d_dot = 0.0;
  double d_ddot = 0.0;
};

// Poses farther than this from the path are rejected as off-corridor.
inline constexpr double kProjectionCorridor = 20.0;  // m

// Resample a polyline at <= 1 m spacing and attach arclength, heading and
// curvature. Throws DegeneratePath for inputs shorter than 1 m or collapsed
// to fewer than two distinct points.
ReferencePath build_reference_path(const std::vector<Eigen::Vector2d>& polyline,
                                   double speed_limit);

// Project a pose onto the path. d is positive to the left of the tangent.
// Throws ProjectionOutOfRange past the 20 m corridor, CurvatureSingularity
// when |d * kappa| >= 1.
FrenetState cartesian_to_frenet(const ReferencePath& path, const Pose& pose,
                                double accel = 0.0);

// Inverse map. Throws ProjectionOutOfRange when s is outside [0, length],
// CurvatureSingularity when |d * kappa| >= 1.
Pose frenet_to_cartesian(const ReferencePath& path, const FrenetState& state);

}  // namespace plankit
