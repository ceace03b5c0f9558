#include "plankit/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "plankit/errors.hpp"

namespace plankit {
namespace {

// Index of the waypoint interval containing s: returns i with
// arclength[i] <= s < arclength[i+1], clamped to the last interval.
std::size_t interval_index(const std::vector<double>& arclength, double s) {
  auto it = std::upper_bound(arclength.begin(), arclength.end(), s);
  std::size_t i = static_cast<std::size_t>(it - arclength.begin());
  if (i > 0) --i;
  if (i + 1 >= arclength.size()) i = arclength.size() - 2;
  return i;
}

}  // namespace

Eigen::Vector2d ReferencePath::point_at(double s) const {
  s = std::clamp(s, 0.0, length());
  std::size_t i = interval_index(arclength, s);
  double seg = arclength[i + 1] - arclength[i];
  double t = seg > 0.0 ? (s - arclength[i]) / seg : 0.0;
  return waypoints[i] + t * (waypoints[i + 1] - waypoints[i]);
}

double ReferencePath::heading_at(double s) const {
  s = std::clamp(s, 0.0, length());
  std::size_t i = interval_index(arclength, s);
  double seg = arclength[i + 1] - arclength[i];
  double t = seg > 0.0 ? (s - arclength[i]) / seg : 0.0;
  return lerp_angle(heading[i], heading[i + 1], t);
}

double ReferencePath::curvature_at(double s) const {
  s = std::clamp(s, 0.0, length());
  std::size_t i = interval_index(arclength, s);
  double seg = arclength[i + 1] - arclength[i];
  double t = seg > 0.0 ? (s - arclength[i]) / seg : 0.0;
  return curvature[i] + t * (curvature[i + 1] - curvature[i]);
}

Eigen::Vector2d ReferencePath::segment_tangent_at(double s) const {
  s = std::clamp(s, 0.0, length());
  std::size_t i = interval_index(arclength, s);
  Eigen::Vector2d delta = waypoints[i + 1] - waypoints[i];
  double n = delta.norm();
  if (n <= 0.0) return {std::cos(heading[i]), std::sin(heading[i])};
  return delta / n;
}

ReferencePath build_reference_path(const std::vector<Eigen::Vector2d>& polyline,
                                   double speed_limit) {
  // Drop consecutive duplicates so segment tangents are well defined.
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(polyline.size());
  for (const auto& p : polyline) {
    if (pts.empty() || (p - pts.back()).norm() > 1e-9) pts.push_back(p);
  }
  if (pts.size() < 2) throw DegeneratePath("reference path needs two distinct points");

  double total = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
  if (total < 1.0) throw DegeneratePath("reference path shorter than 1 m");

  // Resample uniformly at <= 1 m spacing, keeping both endpoints.
  std::size_t segments = static_cast<std::size_t>(std::ceil(total));
  double step = total / static_cast<double>(segments);

  ReferencePath path;
  path.speed_limit = speed_limit;
  path.waypoints.reserve(segments + 1);

  std::vector<double> cum(pts.size(), 0.0);
  for (std::size_t i = 1; i < pts.size(); ++i)
    cum[i] = cum[i - 1] + (pts[i] - pts[i - 1]).norm();

  std::size_t src = 0;
  for (std::size_t k = 0; k <= segments; ++k) {
    double target = std::min(static_cast<double>(k) * step, total);
    while (src + 2 < pts.size() && cum[src + 1] < target) ++src;
    double seg = cum[src + 1] - cum[src];
    double t = seg > 0.0 ? (target - cum[src]) / seg : 0.0;
    path.waypoints.push_back(pts[src] + t * (pts[src + 1] - pts[src]));
  }

  std::size_t n = path.waypoints.size();
  path.arclength.resize(n);
  path.arclength[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i)
    path.arclength[i] = path.arclength[i - 1] + (path.waypoints[i] - path.waypoints[i - 1]).norm();

  // Tangent headings: central differences inside. A bare chord direction at
  // the ends is the mid-segment tangent, which biases the end curvature by
  // half a step, so extrapolate the ends from the adjacent chord turn.
  path.heading.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    Eigen::Vector2d d = path.waypoints[i + 1] - path.waypoints[i - 1];
    path.heading[i] = std::atan2(d.y(), d.x());
  }
  auto chord_heading = [&](std::size_t i) {
    Eigen::Vector2d d = path.waypoints[i + 1] - path.waypoints[i];
    return std::atan2(d.y(), d.x());
  };
  if (n == 2) {
    path.heading[0] = path.heading[1] = chord_heading(0);
  } else {
    path.heading[0] =
        chord_heading(0) - 0.5 * wrap_angle(chord_heading(1) - chord_heading(0));
    path.heading[n - 1] =
        chord_heading(n - 2) +
        0.5 * wrap_angle(chord_heading(n - 2) - chord_heading(n - 3));
  }

  // Curvature = d(heading)/ds with wrapped angle differences.
  path.curvature.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = (i == 0) ? 0 : i - 1;
    std::size_t b = (i == n - 1) ? n - 1 : i + 1;
    double ds = path.arclength[b] - path.arclength[a];
    path.curvature[i] = ds > 0.0 ? wrap_angle(path.heading[b] - path.heading[a]) / ds : 0.0;
  }
  return path;
}

FrenetState cartesian_to_frenet(const ReferencePath& path, const Pose& pose,
                                double accel) {
  const Eigen::Vector2d p(pose.x, pose.y);
  const auto& wp = path.waypoints;

  // Nearest point over all segments; strict < keeps the first best segment.
  double best_dist2 = std::numeric_limits<double>::infinity();
  std::size_t best_i = 0;
  double best_t = 0.0;
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
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

  double dist = std::sqrt(best_dist2);
  if (dist > kProjectionCorridor)
    throw ProjectionOutOfRange("pose is " + std::to_string(dist) +
                               " m from the reference path");

  Eigen::Vector2d ab = wp[best_i + 1] - wp[best_i];
  double s = path.arclength[best_i] + best_t * ab.norm();

  // The nearest-segment foot is exact only for a straight polyline. Refine s
  // with Newton so the residual along the interpolated tangent vanishes; the
  // offset then lies purely along the normal at s, matching the forward map.
  double theta = path.heading_at(s);
  for (int iter = 0; iter < 12; ++iter) {
    theta = path.heading_at(s);
    Eigen::Vector2d tangent(std::cos(theta), std::sin(theta));
    Eigen::Vector2d normal(-tangent.y(), tangent.x());
    Eigen::Vector2d off = p - path.point_at(s);
    double h = off.dot(tangent);
    double hp = -path.segment_tangent_at(s).dot(tangent) +
                off.dot(normal) * path.curvature_at(s);
    if (!(hp < -0.1)) break;  // degenerate slope; keep the segment estimate
    double step = h / hp;
    s = std::clamp(s - step, 0.0, path.length());
    if (std::abs(step) < 1e-12) break;
  }
  theta = path.heading_at(s);

  FrenetState fs;
  fs.s = s;
  // Signed offset: positive when p is to the left of the tangent.
  Eigen::Vector2d off = p - path.point_at(s);
  fs.d = -std::sin(theta) * off.x() + std::cos(theta) * off.y();

  double kappa = path.curvature_at(fs.s);
  double c = 1.0 - kappa * fs.d;
  if (std::abs(kappa * fs.d) >= 1.0)
    throw CurvatureSingularity("lateral offset reaches the curvature center");

  double dtheta = wrap_angle(pose.heading - path.heading_at(fs.s));
  fs.s_dot = pose.speed * std::cos(dtheta) / c;
  fs.d_dot = pose.speed * std::sin(dtheta);
  fs.s_ddot = accel * std::cos(dtheta) / c;
  fs.d_ddot = accel * std::sin(dtheta);
  return fs;
}

Pose frenet_to_cartesian(const ReferencePath& path, const FrenetState& state) {
  if (state.s < 0.0 || state.s > path.length())
    throw ProjectionOutOfRange("s = " + std::to_string(state.s) +
                               " is outside the reference path");

  double kappa = path.curvature_at(state.s);
  if (std::abs(kappa * state.d) >= 1.0)
    throw CurvatureSingularity("lateral offset reaches the curvature center");
  double c = 1.0 - kappa * state.d;

  // Offset along the interpolated-heading normal; the inverse projection
  // refines s against the same tangent field, so the pair round-trips.
  Eigen::Vector2d base = path.point_at(state.s);
  double theta = path.heading_at(state.s);
  Eigen::Vector2d normal(-std::sin(theta), std::cos(theta));

  Pose pose;
  Eigen::Vector2d pt = base + state.d * normal;
  pose.x = pt.x();
  pose.y = pt.y();
  double vs = c * state.s_dot;
  pose.heading = wrap_angle(theta + std::atan2(state.d_dot, vs));
  pose.speed = std::hypot(vs, state.d_dot);
  return pose;
}

}  // namespace plankit
