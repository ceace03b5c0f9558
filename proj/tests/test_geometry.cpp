#include <cmath>
#include <vector>

#include "doctest.h"
#include "plankit/errors.hpp"
#include "plankit/geometry.hpp"
#include "plankit/rng.hpp"

using namespace plankit;

namespace {

std::vector<Eigen::Vector2d> straight_polyline(double length, double spacing) {
  std::vector<Eigen::Vector2d> pts;
  for (double x = 0.0; x <= length + 1e-9; x += spacing) pts.push_back({x, 0.0});
  return pts;
}

std::vector<Eigen::Vector2d> arc_polyline(double radius, double sweep, double spacing) {
  std::vector<Eigen::Vector2d> pts;
  double step = spacing / radius;
  for (double a = 0.0; a <= sweep + 1e-9; a += step)
    pts.push_back({radius * std::sin(a), radius * (1.0 - std::cos(a))});
  return pts;
}

}  // namespace

TEST_SUITE("geometry") {

TEST_CASE("resampling keeps spacing at most one meter and both endpoints") {
  std::vector<Eigen::Vector2d> sparse = {{0, 0}, {13.7, 0}, {13.7, 5.3}};
  ReferencePath path = build_reference_path(sparse, 10.0);
  REQUIRE(path.waypoints.size() >= 2);
  CHECK(path.waypoints.front().isApprox(sparse.front(), 1e-12));
  CHECK((path.waypoints.back() - sparse.back()).norm() < 1e-9);
  for (std::size_t i = 0; i + 1 < path.waypoints.size(); ++i) {
    double ds = (path.waypoints[i + 1] - path.waypoints[i]).norm();
    CHECK(ds <= 1.0 + 1e-9);
    CHECK(path.arclength[i + 1] > path.arclength[i]);
  }
}

TEST_CASE("degenerate polylines are rejected") {
  CHECK_THROWS_AS(build_reference_path({{1.0, 1.0}}, 10.0), DegeneratePath);
  CHECK_THROWS_AS(build_reference_path({{1.0, 1.0}, {1.0, 1.0}}, 10.0), DegeneratePath);
  CHECK_THROWS_AS(build_reference_path({}, 10.0), DegeneratePath);
}

TEST_CASE("straight path has zero heading and curvature") {
  ReferencePath path = build_reference_path(straight_polyline(100.0, 2.0), 10.0);
  for (std::size_t i = 0; i < path.waypoints.size(); ++i) {
    CHECK(path.heading[i] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(path.curvature[i] == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(path.length() == doctest::Approx(100.0).epsilon(1e-9));
}

TEST_CASE("50 m circular arc has curvature 0.02 everywhere") {
  ReferencePath path = build_reference_path(arc_polyline(50.0, 2.0, 0.5), 10.0);
  for (double kappa : path.curvature) CHECK(std::abs(kappa - 0.02) < 1e-3);
}

TEST_CASE("left of the path means positive lateral offset") {
  ReferencePath path = build_reference_path(straight_polyline(100.0, 1.0), 10.0);
  FrenetState left = cartesian_to_frenet(path, {50.0, 3.0, 0.0, 5.0});
  FrenetState right = cartesian_to_frenet(path, {50.0, -3.0, 0.0, 5.0});
  CHECK(left.d == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(right.d == doctest::Approx(-3.0).epsilon(1e-9));
  CHECK(left.s == doctest::Approx(50.0).epsilon(1e-9));
}

TEST_CASE("roundtrip on a straight path is exact to 1e-6") {
  ReferencePath path = build_reference_path(straight_polyline(200.0, 1.0), 10.0);
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    FrenetState fs;
    fs.s = rng.uniform(1.0, 199.0);
    fs.d = rng.uniform(-15.0, 15.0);
    fs.s_dot = rng.uniform(0.0, 20.0);
    fs.d_dot = rng.uniform(-2.0, 2.0);
    Pose pose = frenet_to_cartesian(path, fs);
    FrenetState back = cartesian_to_frenet(path, pose);
    CHECK(std::abs(back.s - fs.s) < 1e-6);
    CHECK(std::abs(back.d - fs.d) < 1e-6);
  }
}

TEST_CASE("roundtrip on a 50 m arc is exact to 1e-3") {
  ReferencePath path = build_reference_path(arc_polyline(50.0, 2.5, 0.5), 10.0);
  Rng rng(13);
  for (int i = 0; i < 1000; ++i) {
    FrenetState fs;
    fs.s = rng.uniform(1.0, path.length() - 1.0);
    fs.d = rng.uniform(-10.0, 10.0);
    fs.s_dot = rng.uniform(0.0, 15.0);
    Pose pose = frenet_to_cartesian(path, fs);
    FrenetState back = cartesian_to_frenet(path, pose);
    CHECK(std::abs(back.s - fs.s) < 1e-3);
    CHECK(std::abs(back.d - fs.d) < 1e-3);
  }
}

TEST_CASE("point one meter inside a 50 m arc roundtrips") {
  ReferencePath path = build_reference_path(arc_polyline(50.0, 2.0, 0.5), 10.0);
  FrenetState fs;
  fs.s = 30.0;
  fs.d = 1.0;  // inside the curve is the +d side for a left-turning arc
  Pose pose = frenet_to_cartesian(path, fs);
  // Position vs. the analytic circle is limited by polyline discretization;
  // the binding 1e-3 contract is on the roundtrip below.
  CHECK(std::hypot(pose.x - 49.0 * std::sin(30.0 / 50.0),
                   pose.y - (50.0 - 49.0 * std::cos(30.0 / 50.0))) < 5e-3);
  FrenetState back = cartesian_to_frenet(path, pose);
  CHECK(std::abs(back.s - 30.0) < 1e-3);
  CHECK(std::abs(back.d - 1.0) < 1e-3);
}

TEST_CASE("points beyond the projection corridor are rejected") {
  ReferencePath path = build_reference_path(straight_polyline(100.0, 1.0), 10.0);
  CHECK_THROWS_AS(cartesian_to_frenet(path, {50.0, 25.0, 0.0, 5.0}),
                  ProjectionOutOfRange);
  CHECK_NOTHROW(cartesian_to_frenet(path, {50.0, 19.0, 0.0, 5.0}));
}

TEST_CASE("lateral offsets at or past the curvature center are rejected") {
  ReferencePath path = build_reference_path(arc_polyline(10.0, 2.0, 0.25), 10.0);
  // d = +10 sits exactly on the arc's center: |d * kappa| = 1.
  CHECK_THROWS_AS(frenet_to_cartesian(path, {15.0, 5.0, 0.0, 10.0, 0.0, 0.0}),
                  CurvatureSingularity);
}

TEST_CASE("speed and heading recover the frenet derivatives") {
  ReferencePath path = build_reference_path(straight_polyline(150.0, 1.0), 10.0);
  FrenetState fs;
  fs.s = 40.0;
  fs.d = 2.0;
  fs.s_dot = 8.0;
  fs.d_dot = 1.5;
  Pose pose = frenet_to_cartesian(path, fs);
  CHECK(pose.speed == doctest::Approx(std::hypot(8.0, 1.5)).epsilon(1e-9));
  CHECK(pose.heading == doctest::Approx(std::atan2(1.5, 8.0)).epsilon(1e-9));
  FrenetState back = cartesian_to_frenet(path, pose);
  CHECK(back.s_dot == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(back.d_dot == doctest::Approx(1.5).epsilon(1e-6));
}

}  // TEST_SUITE
