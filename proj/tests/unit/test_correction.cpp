#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "octaframe/correction.hpp"
#include "octaframe/error.hpp"
#include "octaframe/generate.hpp"
#include "oracles.hpp"

using namespace octaframe;
using testing::Gen;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

FeatureCurve straight_curve(const Vec3& tangent, const Vec3& ray0, const Vec3& ray1, int valence) {
  FeatureCurve c;
  c.id = 0;
  c.vertices = {0};
  c.tangents = {tangent};
  c.rays = {{ray0, ray1}};
  c.normals = {{tangent.cross(ray0), ray1.cross(tangent)}};
  c.target_valence = valence;
  return c;
}

bool contains(const std::vector<Vec3>& dirs, const Vec3& d) {
  for (const Vec3& v : dirs) {
    if ((v - d).norm() < 1e-12) return true;
  }
  return false;
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("extrusion directions: flat imprinted curve sends one sheet inward") {
  const FeatureCurve c = straight_curve(Vec3::UnitZ(), Vec3::UnitX(), -Vec3::UnitX(), 2);
  const auto dirs = extrusion_directions(c, 0, Frame{});
  REQUIRE(dirs.size() == 1);
  CHECK((dirs[0] + Vec3::UnitY()).norm() < 1e-12);
}

TEST_CASE("extrusion directions: concave right-angle edge sends two sheets") {
  // Material everywhere except the quadrant x > 0, y > 0.
  const FeatureCurve c = straight_curve(Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY(), 3);
  const auto dirs = extrusion_directions(c, 0, Frame{});
  REQUIRE(dirs.size() == 2);
  CHECK(contains(dirs, -Vec3::UnitX()));
  CHECK(contains(dirs, -Vec3::UnitY()));
}

TEST_CASE("extrusion directions: concave edge of the L-shaped domain") {
  const Domain d = Domain::build(testing::l_shape_mesh());
  const FeatureCurve* concave = nullptr;
  for (const FeatureCurve& c : d.features.curves) {
    if (c.target_valence == 3) concave = &c;
  }
  REQUIRE(concave != nullptr);
  for (int k = 0; k < static_cast<int>(concave->size()); ++k) {
    const auto dirs = extrusion_directions(*concave, k, Frame{});
    REQUIRE(dirs.size() == 2);
    CHECK(contains(dirs, -Vec3::UnitX()));
    CHECK(contains(dirs, -Vec3::UnitY()));
  }
}

TEST_CASE("extrusion directions: invalid requests") {
  const FeatureCurve convex = straight_curve(Vec3::UnitZ(), Vec3::UnitX(), Vec3::UnitY(), 1);
  CHECK(kind_of([&] { extrusion_directions(convex, 0, Frame{}); }) == ErrorKind::InvalidArgument);
  const FeatureCurve flat = straight_curve(Vec3::UnitZ(), Vec3::UnitX(), -Vec3::UnitX(), 2);
  CHECK(kind_of([&] { extrusion_directions(flat, 3, Frame{}); }) == ErrorKind::IndexOutOfRange);
  // A frame turned 45 degrees in the plane puts two axes inside the half-space.
  const Frame turned{testing::rot_z(45 * kDeg)};
  CHECK(kind_of([&] { extrusion_directions(flat, 0, turned); }) == ErrorKind::WedgeMismatch);
}

TEST_CASE("snapped frame on an x-directed path with normal z is a 45 degree turn about x") {
  const Mat3 R = snapped_frame(Vec3::UnitX(), Vec3::UnitZ());
  CHECK((R - oracle::axis_angle(Vec3::UnitX(), 45 * kDeg)).norm() < 1e-15);
}

TEST_CASE("property: snapped frames keep the tangent and sit at 45 degrees to the normal") {
  Gen g(91);
  for (int i = 0; i < 500; ++i) {
    const Vec3 n = g.unit();
    const Vec3 t = (g.unit().cross(n)).normalized();
    const Mat3 R = snapped_frame(t, n);
    CHECK((R.transpose() * R - Mat3::Identity()).norm() < 1e-12);
    CHECK(R.determinant() == doctest::Approx(1.0));
    CHECK((R.col(0) - t).norm() < 1e-12);
    CHECK(R.col(1).dot(n) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(R.col(2).dot(n) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  }
}

TEST_CASE("snapped path across the top face") {
  const Domain d = testing::box_domain(4, 4, 4);
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  SnapAssignment s;
  s.chain = 0;
  for (int i = 0; i <= 4; ++i) {
    const Vec3 p(0.25 * i, 0.5, 1.0);
    for (int v = 0; v < static_cast<int>(d.mesh.num_vertices()); ++v) {
      if ((d.mesh.vertices[v] - p).norm() < 1e-12) s.path.push_back(v);
    }
  }
  REQUIRE(s.path.size() == 5);
  s.targets = {SnapTarget{s.path.front(), true}, SnapTarget{s.path.back(), true}};
  const double radius = 0.3;
  const BoundaryConditionSet out = build_snapped_bcs(d, bcs, {s}, radius);
  for (std::size_t i = 1; i + 1 < s.path.size(); ++i) {
    REQUIRE(out.dirichlet.count(s.path[i]) == 1);
    const Mat3 R = project_to_octahedral(out.dirichlet.at(s.path[i])).frame.R;
    const Vec3 along = closest_direction(Vec3::UnitX(), Frame{R});
    CHECK((along - Vec3::UnitX()).norm() < 1e-9);
    for (int k = 0; k < 3; ++k) {
      const double c = std::abs(R.col(k).dot(Vec3::UnitZ()));
      CHECK((c < 1e-9 || std::abs(c - std::sqrt(0.5)) < 1e-9));
    }
  }
  // Tangency vertices near the path are released, far ones keep their constraint.
  for (const auto& [v, n] : bcs.tangency) {
    if (out.dirichlet.count(v)) continue;
    const Vec3& p = d.mesh.vertices[v];
    if (p.z() == 1.0 && std::abs(p.y() - 0.5) < 0.2) {
      CHECK(out.free_boundary.count(v) == 1);
    }
    if (p.z() == 0.0) {
      CHECK(out.tangency.count(v) == 1);
    }
  }
  CHECK(build_snapped_bcs(d, bcs, {}, radius) == bcs);
}

TEST_CASE("plans on a field without singularities change nothing") {
  const Domain d = testing::box_domain(3, 3, 3);
  const FrameField f = compute_field(d, build_boundary_conditions(d), SolverConfig{});
  const SingularityGraph g = extract_graph(d, f);
  REQUIRE(g.chains.empty());
  const CorrectionPlan nodes = extrude_singular_nodes(d, f, g);
  CHECK(nodes.applicable);
  CHECK(nodes.constraints.empty());
  const CorrectionPlan snap = snap_35_curves(d, f, g);
  CHECK(snap.applicable);
  CHECK(snap.snaps.empty());
  for (const CorrectionPlan* p : {&nodes, &snap}) {
    const CorrectionResult r = apply_plan(d, f, *p, SolverConfig{});
    CHECK(r.field.bcs == f.bcs);
    for (std::size_t v = 0; v < f.size(); ++v) CHECK(oracle::frame_distance(r.field.frames[v], f.frames[v]) < 1e-7);
    CHECK(r.graph.chains.empty());
  }
  // Box curves all have valence 1, so no sheet is swept.
  const CorrectionPlan curves = extrude_feature_curves(d, f);
  CHECK(curves.applicable);
  CHECK(curves.constraints.empty());
}

TEST_CASE("applying a non-applicable plan throws and leaves the field alone") {
  const Domain d = testing::box_domain(2, 2, 2);
  const FrameField f = compute_field(d, build_boundary_conditions(d), SolverConfig{});
  const FrameField copy = f;
  CorrectionPlan p;
  p.strategy = Strategy::ExtrudeNodes;
  p.fail("planted failure");
  CHECK_FALSE(p.applicable);
  CHECK(p.failures.size() == 1);
  CHECK(p.diagnostics.size() == 1);
  CHECK(kind_of([&] { apply_plan(d, f, p, SolverConfig{}); }) == ErrorKind::NonApplicable);
  for (std::size_t v = 0; v < f.size(); ++v) CHECK(f.coeffs[v] == copy.coeffs[v]);
}

TEST_CASE("nearest vertex") {
  const Domain d = testing::box_domain(4, 4, 4);
  Gen g(92);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(g.uniform(0, 1), g.uniform(0, 1), g.uniform(0, 1));
    const int v = nearest_vertex(d, p);
    REQUIRE(v >= 0);
    const Vec3 snapped = (p * 4).array().round() / 4;
    CHECK((d.mesh.vertices[v] - snapped).norm() < 1e-12);
  }
  CHECK(nearest_vertex(d, Vec3(2, 2, 2)) == -1);
}

TEST_CASE("sheet spiralling into a limit cycle makes curve extrusion non-applicable") {
  // Imprinted curve along y on the bottom face; frames circle around the
  // line x = 1, z = 0.5 and attract streamlines onto radius r0.
  BoxOptions o;
  o.extent = Vec3(2.0, 1.0, 1.0);
  TetMesh m = generate_box(40, 4, 20, o);
  std::vector<int> line;
  for (int v = 0; v < static_cast<int>(m.num_vertices()); ++v) {
    const Vec3& p = m.vertices[v];
    if (std::abs(p.x() - 1.0) < 1e-12 && p.z() == 0.0) line.push_back(v);
  }
  std::sort(line.begin(), line.end(), [&](int a, int b) { return m.vertices[a].y() < m.vertices[b].y(); });
  REQUIRE(line.size() == 5);
  for (std::size_t k = 0; k + 1 < line.size(); ++k) m.feature_edges.push_back({{line[k], line[k + 1]}, 12});
  const Domain d = Domain::build(std::move(m));
  const FeatureCurve* imprinted = nullptr;
  for (const FeatureCurve& c : d.features.curves) {
    if (c.source_tag == 12) imprinted = &c;
  }
  REQUIRE(imprinted != nullptr);
  CHECK(imprinted->target_valence == 2);

  const double r0 = 0.2, width = 0.2;
  FrameField f = testing::field_from(d, [&](const Vec3& p) {
    const Vec3 r(p.x() - 1.0, 0.0, p.z() - 0.5);
    const double len = r.norm();
    Mat3 R = Mat3::Identity();
    if (len < 1e-9) return R;
    const Vec3 rh = r / len, th = Vec3::UnitY().cross(rh);
    const double tilt = 89.0 * kDeg * std::tanh((len - r0) / width);
    const Vec3 a1 = std::cos(tilt) * th - std::sin(tilt) * rh;
    R.col(0) = a1;
    R.col(1) = Vec3::UnitY();
    R.col(2) = a1.cross(Vec3::UnitY());
    return R;
  });
  f.bcs = build_boundary_conditions(d);
  ExtrusionOptions opt;
  opt.tracer.max_length = 6.0;
  const CorrectionPlan plan = extrude_feature_curves(d, f, opt);
  CHECK_FALSE(plan.applicable);
  bool reported = false;
  for (const std::string& msg : plan.failures) reported = reported || msg.find("limit cycle") != std::string::npos;
  CHECK(reported);
  int cycles = 0;
  for (const TracedLine& t : plan.streamlines) {
    if (t.source != imprinted->id) continue;
    CHECK(t.line.termination == Termination::MaxLength);
    ++cycles;
    const Vec3& e = t.line.points.back();
    CHECK(std::hypot(e.x() - 1.0, e.z() - 0.5) == doctest::Approx(r0).epsilon(0.1));
  }
  CHECK(cycles == 3);
  CHECK(kind_of([&] { apply_plan(d, f, plan, SolverConfig{}); }) == ErrorKind::NonApplicable);
}
