#include "plankit/features.hpp"

#include <cmath>

#include "plankit/errors.hpp"

namespace plankit {

const std::array<std::string, 7>& FeatureVector::names() {
  static const std::array<std::string, 7> kNames = {
      "travel", "acc", "jerk", "lat_acc", "headway", "lateral_dist", "safety"};
  return kNames;
}

namespace {

// Central differences inside, one-sided at the ends.
std::vector<double> difference(const std::vector<double>& x, double dt) {
  std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d[0] = (x[1] - x[0]) / dt;
  d[n - 1] = (x[n - 1] - x[n - 2]) / dt;
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (x[i + 1] - x[i - 1]) / (2.0 * dt);
  return d;
}

// Nearest-segment projection with a warm-start hint: consecutive samples move
// a few centimeters per step, so a windowed search around the previous
// segment is exact on lane-shaped paths and much cheaper than a full scan.
class PathProjector {
 public:
  explicit PathProjector(const ReferencePath& path) : path_(path) {}

  // Returns false when the point is farther than max_dist from the path.
  bool project(double x, double y, double max_dist, double& s, double& d) {
    const auto& wp = path_.waypoints;
    Eigen::Vector2d p(x, y);
    std::size_t lo = 0, hi = wp.size() - 1;
    if (hint_ >= 0) {
      lo = static_cast<std::size_t>(std::max(0, hint_ - kWindow));
      hi = std::min(wp.size() - 1, static_cast<std::size_t>(hint_ + kWindow));
    }
    double best_dist2 = std::numeric_limits<double>::infinity();
    std::size_t best_i = lo;
    double best_t = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      Eigen::Vector2d a = wp[i];
      Eigen::Vector2d ab = wp[i + 1] - a;
      double len2 = ab.squaredNorm();
      double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
      double dist2 = (a + t * ab - p).squaredNorm();
      if (dist2 < best_dist2) {
        best_dist2 = dist2;
        best_i = i;
        best_t = t;
      }
    }
    if (best_dist2 > max_dist * max_dist) {
      hint_ = -1;
      return false;
    }
    hint_ = static_cast<int>(best_i);
    Eigen::Vector2d a = wp[best_i];
    Eigen::Vector2d ab = wp[best_i + 1] - a;
    s = path_.arclength[best_i] + best_t * ab.norm();
    Eigen::Vector2d tangent = ab.normalized();
    Eigen::Vector2d off = p - (a + best_t * ab);
    d = tangent.x() * off.y() - tangent.y() * off.x();
    return true;
  }

 private:
  static constexpr int kWindow = 40;
  const ReferencePath& path_;
  int hint_ = -1;
};

}  // namespace

void compute_trajectory_features(const TrajectoryProposal& proposal,
                                 const ReferencePath& path, double v_limit,
                                 const FeatureConfig& cfg, FeatureVector& out) {
  const auto& states = proposal.states;
  std::vector<double> speeds(states.size());
  for (std::size_t t = 0; t < states.size(); ++t) speeds[t] = states[t].speed;

  double travel = 0.0;
  for (double v : speeds) travel += std::abs(v - v_limit) / v_limit;
  out.travel = travel / static_cast<double>(speeds.size());

  std::vector<double> a_lon = difference(speeds, kDt);
  std::vector<double> j_lon = difference(a_lon, kDt);
  double max_a = 0.0, max_j = 0.0;
  for (double a : a_lon) max_a = std::max(max_a, std::abs(a));
  for (double j : j_lon) max_j = std::max(max_j, std::abs(j));
  out.acc = max_a / cfg.a_lon_max;
  out.jerk = max_j / cfg.j_max;

  double max_lat = 0.0;
  for (std::size_t t = 0; t < states.size(); ++t) {
    double tau = static_cast<double>(t + 1) * kDt;
    double kappa = path.curvature_at(proposal.frenet_states[t].s);
    double a_lat = speeds[t] * speeds[t] * kappa + proposal.lat.acceleration(tau);
    max_lat = std::max(max_lat, std::abs(a_lat));
  }
  out.lat_acc = max_lat / cfg.a_lat_max;
}

bool collision_indicator(const Pose& pose_a, double length_a, double width_a,
                         const Pose& pose_b, double length_b, double width_b,
                         const FeatureConfig& cfg) {
  int n = cfg.circles_per_vehicle;
  double ra = std::hypot(length_a / (2.0 * n), width_a / 2.0);
  double rb = std::hypot(length_b / (2.0 * n), width_b / 2.0);
  double ca = std::cos(pose_a.heading), sa = std::sin(pose_a.heading);
  double cb = std::cos(pose_b.heading), sb = std::sin(pose_b.heading);
  for (int i = 0; i < n; ++i) {
    double oa = -length_a / 2.0 + length_a / (2.0 * n) +
                static_cast<double>(i) * length_a / n;
    double ax = pose_a.x + oa * ca, ay = pose_a.y + oa * sa;
    for (int j = 0; j < n; ++j) {
      double ob = -length_b / 2.0 + length_b / (2.0 * n) +
                  static_cast<double>(j) * length_b / n;
      double bx = pose_b.x + ob * cb, by = pose_b.y + ob * sb;
      if (std::hypot(ax - bx, ay - by) < ra + rb) return true;
    }
  }
  return false;
}

void compute_interaction_features(const TrajectoryProposal& proposal,
                                  const PredictedFutures& futures,
                                  const Scenario& scenario, const ReferencePath& path,
                                  const FeatureConfig& cfg, FeatureVector& out) {
  out.headway = 0.0;
  out.lateral_dist = 0.0;
  out.safety = 0.0;
  std::size_t A = futures.num_agents();
  std::size_t K = futures.modes.size();
  if (A == 0 || K == 0) return;

  const AgentTrack& av = scenario.av();
  constexpr double kNoRiskValue = 10.0;  // stands in when a mode has no counterpart

  double hw_sum = 0.0, ld_sum = 0.0, safety_sum = 0.0;
  bool any_leader = false, any_side = false;

  for (std::size_t k = 0; k < K; ++k) {
    // Projected per-agent means, plus finite-difference headings for the
    // collision boxes.
    std::vector<PathProjector> projector(A, PathProjector(path));
    std::vector<double> last_heading(A);
    for (std::size_t a = 0; a < A; ++a)
      last_heading[a] =
          scenario.agents[static_cast<std::size_t>(futures.agent_indices[a])]
              .current()
              .heading;
    std::vector<double> prev_mu_x(A, 0.0), prev_mu_y(A, 0.0);

    double hw_k = std::numeric_limits<double>::infinity();
    double ld_k = std::numeric_limits<double>::infinity();
    double safety_k = 0.0;
    bool mode_leader = false, mode_side = false;

    for (int t = 0; t < kFutureSteps; ++t) {
      const FrenetState& fav = proposal.frenet_states[static_cast<std::size_t>(t)];
      const Pose& pav = proposal.states[static_cast<std::size_t>(t)];
      double v_av = std::max(pav.speed, cfg.v_floor);

      double best_gap = std::numeric_limits<double>::infinity();
      bool step_leader = false;
      int step_collision = 0;
      for (std::size_t a = 0; a < A; ++a) {
        const GaussianParams& g = futures.modes[k][a][static_cast<std::size_t>(t)];
        const AgentTrack& other =
            scenario.agents[static_cast<std::size_t>(futures.agent_indices[a])];

        double heading = last_heading[a];
        if (t > 0) {
          double dx = g.mu_x - prev_mu_x[a], dy = g.mu_y - prev_mu_y[a];
          if (std::hypot(dx, dy) > 1e-3) heading = std::atan2(dy, dx);
        }
        last_heading[a] = heading;
        prev_mu_x[a] = g.mu_x;
        prev_mu_y[a] = g.mu_y;

        if (step_collision == 0 &&
            collision_indicator(pav, av.length, av.width,
                                Pose{g.mu_x, g.mu_y, heading, 0.0}, other.length,
                                other.width, cfg))
          step_collision = 1;

        double s = 0.0, d = 0.0;
        if (!projector[a].project(g.mu_x, g.mu_y, kProjectionCorridor, s, d)) continue;

        double half_lengths = 0.5 * (other.length + av.length);
        if (s > fav.s && std::abs(d - fav.d) < cfg.lane_half_width) {
          double gap = std::max((s - fav.s) - half_lengths, 0.1);
          if (gap < best_gap) {
            best_gap = gap;
            step_leader = true;
          }
        }
        if (std::abs(s - fav.s) < half_lengths) {
          double lat_gap =
              std::max(std::abs(d - fav.d) - 0.5 * (other.width + av.width), 0.0);
          ld_k = std::min(ld_k, lat_gap);
          mode_side = true;
        }
      }
      if (step_leader) {
        hw_k = std::min(hw_k, best_gap / v_av);
        mode_leader = true;
      }
      safety_k += static_cast<double>(step_collision);
    }

    double p = futures.mode_probs[k];
    hw_sum += p * (mode_leader ? hw_k : kNoRiskValue);
    ld_sum += p * (mode_side ? ld_k : kNoRiskValue);
    safety_sum += p * safety_k;
    any_leader = any_leader || mode_leader;
    any_side = any_side || mode_side;
  }

  double factor = cfg.drop_mode_count_factor ? 1.0 : 1.0 / static_cast<double>(K);
  if (any_leader) {
    double hw = factor * hw_sum;
    out.headway = std::exp(-hw * hw);
  }
  if (any_side) {
    double ld = factor * ld_sum;
    out.lateral_dist = std::exp(-ld * ld);
  }
  out.safety = factor * safety_sum;
}

FeatureVector compute_features(const Scenario& scenario, const TrajectoryProposal& proposal,
                               const PredictedFutures& futures, const ReferencePath& path,
                               const FeatureConfig& cfg) {
  FeatureVector out;
  compute_trajectory_features(proposal, path, path.speed_limit, cfg, out);
  compute_interaction_features(proposal, futures, scenario, path, cfg, out);
  return out;
}

}  // namespace plankit
