#include <doctest.h>

#include "helpers.hpp"
#include "octaframe/error.hpp"
#include "octaframe/generate.hpp"
#include "octaframe/singularity.hpp"
#include "octaframe/solver.hpp"
#include "oracles.hpp"

using namespace octaframe;
using testing::Gen;

namespace {

Domain bulge_domain(int n, double amplitude) {
  BoxOptions o;
  o.deformation = BoxDeformation::Bulge;
  o.amplitude = amplitude;
  return Domain::build(generate_box(n, n, n, o));
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

TEST_CASE("box boundary conditions: curves and corners fixed, faces tangent") {
  const Domain d = testing::box_domain(3, 3, 3);
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  CHECK(bcs.dirichlet.size() == 8 + 12 * 2);
  CHECK(bcs.tangency.size() == 6 * 4);
  CHECK(bcs.free_boundary.empty());
  for (const auto& [v, q] : bcs.dirichlet) {
    CHECK(oracle::frame_distance(project_to_octahedral(q).frame.R, Mat3::Identity()) < 1e-9);
  }
  for (const auto& [v, n] : bcs.tangency) {
    const Vec3& p = d.mesh.vertices[v];
    Vec3 expect = Vec3::Zero();
    for (int k = 0; k < 3; ++k) {
      if (p[k] == 0.0) expect[k] = -1.0;
      if (p[k] == 1.0) expect[k] = 1.0;
    }
    CHECK((n - expect).norm() < 1e-12);
  }
  for (int v = 0; v < static_cast<int>(d.mesh.num_vertices()); ++v) {
    CHECK((bcs.kind(v) == BoundaryConditionSet::Kind::None) == !d.topology.is_boundary_vertex(v));
  }
}

TEST_CASE("cube: the solved field is the constant axis-aligned frame with no singularities") {
  const Domain d = testing::box_domain(4, 4, 4);
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  SmoothReport rep;
  const FrameField f = compute_field(d, bcs, SolverConfig{}, &rep);
  double worst = 0.0;
  for (std::size_t v = 0; v < f.size(); ++v) worst = std::max(worst, oracle::frame_distance(f.frames[v], Mat3::Identity()));
  CHECK(worst < 1e-7);
  CHECK(rep.converged);
  const SingularityGraph g = extract_graph(d, f);
  CHECK(g.faces.empty());
  CHECK(g.chains.empty());
}

TEST_CASE("property: the constrained Laplace solution minimizes energy over feasible perturbations") {
  Gen g(61);
  for (double amplitude : {0.2, 0.4}) {
    const Domain d = bulge_domain(4, amplitude);
    const BoundaryConditionSet bcs = build_boundary_conditions(d);
    const std::vector<Coeffs> q = solve_constrained_laplace(d, bcs, SolverConfig{});
    const double e0 = dirichlet_energy(d.stiffness, q);
    for (const auto& [v, c] : bcs.dirichlet) CHECK((q[v] - c).norm() < 1e-12);
    for (const auto& [v, n] : bcs.tangency) {
      const TangencyBasis b = tangency_basis(n);
      const Coeffs r = q[v] - b.h0;
      CHECK((r - b.h1 * b.h1.dot(r) - b.h2 * b.h2.dot(r)).norm() < 1e-9);
    }
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Coeffs> p = q;
      const double eps = g.uniform(1e-4, 1e-2);
      for (int v = 0; v < static_cast<int>(p.size()); ++v) {
        switch (bcs.kind(v)) {
          case BoundaryConditionSet::Kind::Dirichlet: break;
          case BoundaryConditionSet::Kind::Tangency: {
            const TangencyBasis b = tangency_basis(bcs.tangency.at(v));
            p[v] += eps * (g.normal() * b.h1 + g.normal() * b.h2);
            break;
          }
          default: p[v] += eps * g.coeffs(); break;
        }
      }
      CHECK(dirichlet_energy(d.stiffness, p) >= e0 - 1e-9 * std::abs(e0));
    }
  }
}

TEST_CASE("initial solve puts tangency vertices on their circle") {
  const Domain d = bulge_domain(4, 0.3);
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  const FrameField f = solve_initial(d, bcs, SolverConfig{});
  for (const auto& [v, n] : bcs.tangency) {
    const TangencyBasis b = tangency_basis(n);
    const Coeffs r = f.coeffs[v] - b.h0;
    const double c = b.h1.dot(r), s = b.h2.dot(r);
    CHECK(c * c + s * s == doctest::Approx(5.0 / 12.0).epsilon(1e-9));
  }
}

TEST_CASE("unrelaxed smoothing never increases the energy") {
  const Domain d = bulge_domain(5, 0.4);
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  SolverConfig cfg;
  cfg.relaxation = 0.0;
  cfg.smoothing_sweeps = 20;
  cfg.convergence_delta = 0.0;
  SmoothReport rep;
  const FrameField init = solve_initial(d, bcs, cfg);
  double prev = dirichlet_energy(d.stiffness, init.coeffs);
  smooth_nonlinear(d, init, cfg, &rep);
  REQUIRE(rep.energy_history.size() == 20);
  for (double e : rep.energy_history) {
    CHECK(e <= prev + 1e-12 * prev);
    prev = e;
  }
}

TEST_CASE("smoothing keeps Dirichlet vertices fixed and tangency vertices tangent") {
  const Domain d = bulge_domain(4, 0.3);
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  const FrameField f = compute_field(d, bcs, SolverConfig{});
  for (const auto& [v, c] : bcs.dirichlet) CHECK((f.coeffs[v] - c).norm() < 1e-12);
  for (const auto& [v, n] : bcs.tangency) {
    const Frame fr = f.frame(v);
    CHECK(std::abs(closest_direction(n, fr).dot(n)) > 0.99);
  }
  for (double q : f.quality) CHECK(q > 0.5);
}

TEST_CASE("solver config validation") {
  SolverConfig c;
  CHECK_NOTHROW(c.validate());
  auto bad = [](auto mutate) {
    SolverConfig s;
    mutate(s);
    CHECK_THROWS_AS(s.validate(), Error);
  };
  bad([](SolverConfig& s) { s.relaxation = -0.1; });
  bad([](SolverConfig& s) { s.relaxation = 1.5; });
  bad([](SolverConfig& s) { s.smoothing_sweeps = -1; });
  bad([](SolverConfig& s) { s.cg_tolerance = 0.0; });
  bad([](SolverConfig& s) { s.max_cg_iters = -3; });
}

TEST_CASE("internal constraints") {
  const Domain d = testing::box_domain(4, 4, 4);
  const BoundaryConditionSet bcs = build_boundary_conditions(d);
  FrameField f = compute_field(d, bcs, SolverConfig{});
  int interior = -1, boundary = -1;
  for (int v = 0; v < static_cast<int>(d.mesh.num_vertices()); ++v) {
    (d.topology.is_boundary_vertex(v) ? boundary : interior) = v;
  }
  REQUIRE(interior >= 0);

  const InternalConstraint dir{interior, InternalConstraint::Kind::TangencyDir, Vec3(1, 1, 0).normalized()};
  const FrameField g = apply_internal_constraints(d, f, std::span(&dir, 1));
  CHECK(g.bcs.tangency.count(interior) == 1);

  const InternalConstraint same[2] = {dir, dir};
  CHECK_NOTHROW(apply_internal_constraints(d, f, same));

  const InternalConstraint clash[2] = {dir, {interior, InternalConstraint::Kind::TangencyDir, Vec3::UnitZ()}};
  CHECK(kind_of([&] { apply_internal_constraints(d, f, clash); }) == ErrorKind::ConflictingConstraint);

  const InternalConstraint fixed{interior, InternalConstraint::Kind::DirichletCoeffs, Vec3::UnitZ(),
                                 coeffs_from_rotation(testing::rot_z(0.3))};
  const InternalConstraint mixed[2] = {dir, fixed};
  CHECK(kind_of([&] { apply_internal_constraints(d, f, mixed); }) == ErrorKind::ConflictingConstraint);

  const InternalConstraint on_boundary{boundary, InternalConstraint::Kind::TangencyDir, Vec3::UnitZ()};
  CHECK(kind_of([&] { apply_internal_constraints(d, f, std::span(&on_boundary, 1)); }) == ErrorKind::InvalidArgument);
}
