#pragma once

#include <Eigen/Core>
#include <array>
#include <string>

#include "plankit/behavior.hpp"
#include "plankit/prediction.hpp"

namespace plankit {

// The seven scalar features scored by the linear cost.
struct FeatureVector {
  double travel = 0.0;
  double acc = 0.0;
  double jerk = 0.0;
  double lat_acc = 0.0;
  double headway = 0.0;
  double lateral_dist = 0.0;
  double safety = 0.0;

  Eigen::Matrix<double, 7, 1> as_vector() const {
    Eigen::Matrix<double, 7, 1> v;
    v << travel, acc, jerk, lat_acc, headway, lateral_dist, safety;
    return v;
  }
  static const std::array<std::string, 7>& names();
};

struct FeatureConfig {
  double a_lon_max = 5.0;        // m/s^2
  double j_max = 10.0;           // m/s^3
  double a_lat_max = 5.0;        // m/s^2
  double lane_half_width = 1.75; // m, leader corridor
  double v_floor = 0.1;          // m/s, headway denominator floor
  int circles_per_vehicle = 3;
  // The aggregation of per-mode interaction terms carries both a 1/K factor
  // and the mode probabilities; this flag drops the extra 1/K for sensitivity
  // studies. Default keeps it.
  bool drop_mode_count_factor = false;
};

// Comfort/progress features of the proposal itself:
// travel = mean |v - v_limit| / v_limit, acc/jerk from speed differences,
// lat_acc from the curvature term v^2*kappa plus the lateral polynomial.
void compute_trajectory_features(const TrajectoryProposal& proposal,
                                 const ReferencePath& path, double v_limit,
                                 const FeatureConfig& cfg, FeatureVector& out);

// Circle-approximation overlap test. Each box is covered by
// circles_per_vehicle circles spaced along its longitudinal axis; the test is
// conservative: it never reports "clear" for truly overlapping rectangles.
bool collision_indicator(const Pose& pose_a, double length_a, double width_a,
                         const Pose& pose_b, double length_b, double width_b,
                         const FeatureConfig& cfg);

// Interaction features (headway, lateral_dist, safety) from the predicted
// Gaussian means of each mode, probability-weighted.
void compute_interaction_features(const TrajectoryProposal& proposal,
                                  const PredictedFutures& futures,
                                  const Scenario& scenario, const ReferencePath& path,
                                  const FeatureConfig& cfg, FeatureVector& out);

// All seven features for one proposal.
FeatureVector compute_features(const Scenario& scenario, const TrajectoryProposal& proposal,
                               const PredictedFutures& futures, const ReferencePath& path,
                               const FeatureConfig& cfg = {});

}  // namespace plankit
