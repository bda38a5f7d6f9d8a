#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "octaframe/error.hpp"
#include "octaframe/streamline.hpp"
#include "oracles.hpp"

using namespace octaframe;
using testing::Gen;

namespace {

double line_deviation(const Streamline& s, const Vec3& p0, const Vec3& dir) {
  double worst = 0.0;
  for (const Vec3& p : s.points) worst = std::max(worst, (p - p0).cross(dir).norm());
  return worst;
}

}  // namespace

TEST_CASE("point location and interpolation") {
  const Domain d = testing::box_domain(3, 3, 3);
  Gen g(81);
  FrameField f;
  for (std::size_t v = 0; v < d.mesh.num_vertices(); ++v) f.coeffs.push_back(coeffs_from_rotation(g.rotation()));
  update_projection(f);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p(g.uniform(0, 1), g.uniform(0, 1), g.uniform(0, 1));
    const int t = locate_point(d, p, g.integer(0, static_cast<int>(d.mesh.num_tets()) - 1));
    REQUIRE(t >= 0);
    CHECK(barycentric(d.mesh, t, p).minCoeff() > -1e-12);
  }
  CHECK(locate_point(d, Vec3(1.5, 0.5, 0.5)) == -1);
  for (int v = 0; v < static_cast<int>(d.mesh.num_vertices()); v += 7) {
    const FrameSample s = interpolate_frame(d, f, d.mesh.vertices[v]);
    CHECK(oracle::frame_distance(s.frame.R, f.frames[v]) < 1e-7);
  }
  CHECK_THROWS_AS(interpolate_frame(d, f, Vec3(0.5, 0.5, -0.5)), Error);
}

TEST_CASE("constant field: straight line ending on the boundary") {
  const Domain d = testing::box_domain(4, 4, 4);
  const FrameField f = testing::field_from(d, [](const Vec3&) { return Mat3::Identity(); });
  const Vec3 p0(0.1, 0.37, 0.52);
  const Streamline s = trace(d, f, p0, Vec3(1.0, 0.2, 0.0));
  CHECK(s.termination == Termination::ExitedBoundary);
  CHECK(line_deviation(s, p0, Vec3::UnitX()) < 1e-12);
  CHECK(s.points.back().x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.length == doctest::Approx(0.9).epsilon(1e-12));
  for (const Vec3& v : s.directions) CHECK((v - Vec3::UnitX()).norm() < 1e-12);
}

TEST_CASE("rotated constant field: straight line along the rotated axis") {
  const Domain d = testing::box_domain(4, 4, 4);
  const double a = std::numbers::pi / 6;
  const FrameField f = testing::field_from(d, [a](const Vec3&) { return testing::rot_z(a); });
  const Vec3 dir(std::cos(a), std::sin(a), 0.0), p0(0.2, 0.3, 0.5);
  const Streamline s = trace(d, f, p0, Vec3(1.0, 0.3, 0.1));
  CHECK(s.termination == Termination::ExitedBoundary);
  CHECK(line_deviation(s, p0, dir) < 1e-12);
  CHECK(s.points.back().x() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("property: straight traces in random constant fields") {
  Gen g(82);
  const Domain d = testing::box_domain(3, 3, 3);
  for (int i = 0; i < 20; ++i) {
    const Mat3 R = g.rotation();
    const FrameField f = testing::field_from(d, [&](const Vec3&) { return R; });
    const Vec3 p0(g.uniform(0.2, 0.8), g.uniform(0.2, 0.8), g.uniform(0.2, 0.8));
    const Vec3 v0 = g.unit();
    const Vec3 axis = closest_direction(v0, Frame{R});
    const Streamline s = trace(d, f, p0, v0);
    CHECK(s.termination == Termination::ExitedBoundary);
    CHECK(line_deviation(s, p0, axis) < 1e-11);
    const Vec3& e = s.points.back();
    CHECK(std::min({e.x(), e.y(), e.z(), 1 - e.x(), 1 - e.y(), 1 - e.z()}) < 1e-12);
  }
}

TEST_CASE("reversed trace returns to the seed") {
  const Domain d = testing::box_domain(8, 8, 2, Vec3(2.0, 2.0, 0.5));
  const FrameField f = testing::twist_field(d, 0.6);
  TracerConfig c;
  c.step = 0.1;
  c.max_length = 1.2;
  const Vec3 p0(0.3, 0.3, 0.25);
  const Streamline fwd = trace(d, f, p0, Vec3::UnitX(), c);
  CHECK(fwd.termination == Termination::MaxLength);
  const Streamline back = trace(d, f, fwd.points.back(), -fwd.directions.back(), c);
  CHECK((back.points.back() - p0).norm() < c.step);
  CHECK((back.points.back() - p0).norm() < 1e-5);
}

TEST_CASE("max length stops the trace") {
  const Domain d = testing::box_domain(4, 4, 4);
  const FrameField f = testing::field_from(d, [](const Vec3&) { return Mat3::Identity(); });
  TracerConfig c;
  c.step = 0.05;
  c.max_length = 0.3;
  const Streamline s = trace(d, f, Vec3(0.1, 0.5, 0.5), Vec3::UnitX(), c);
  CHECK(s.termination == Termination::MaxLength);
  CHECK(s.length == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(s.points.back().x() == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("seed outside the mesh") {
  const Domain d = testing::box_domain(2, 2, 2);
  const FrameField f = testing::field_from(d, [](const Vec3&) { return Mat3::Identity(); });
  try {
    trace(d, f, Vec3(2.0, 0.5, 0.5), Vec3::UnitX());
    FAIL("expected SeedOutside");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SeedOutside);
  }
}

TEST_CASE("RK4 converges at fourth order on a smooth twisting field") {
  const Domain d = testing::box_domain(8, 8, 2, Vec3(2.0, 2.0, 0.5));
  const double theta = 0.6;
  const FrameField f = testing::twist_field(d, theta);
  const Vec3 p0(0.01, 0.3, 0.25);
  const double exact = oracle::twist_exit_height(theta, p0.x(), p0.y());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double steps[] = {0.4, 0.2, 0.1, 0.05};
  for (double h : steps) {
    TracerConfig c;
    c.step = h;
    const Streamline s = trace(d, f, p0, Vec3::UnitX(), c);
    REQUIRE(s.termination == Termination::ExitedBoundary);
    CHECK(s.points.back().x() == doctest::Approx(2.0).epsilon(1e-12));
    const double err = std::abs(s.points.back().y() - exact);
    const double x = std::log(h), y = std::log(err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = 4.0;
  const double order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CAPTURE(order);
  CHECK(order >= 3.5);
}
