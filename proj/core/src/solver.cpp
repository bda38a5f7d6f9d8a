#include "octaframe/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>

#include "octaframe/error.hpp"

namespace octaframe {

namespace {

const double kCircleRadius = std::sqrt(5.0 / 12.0);

}  // namespace

StiffnessMatrix assemble_stiffness(const TetMesh& mesh) {
  const int nv = static_cast<int>(mesh.num_vertices());
  const int nt = static_cast<int>(mesh.num_tets());
  double mean_volume = 0.0;
  for (int t = 0; t < nt; ++t) mean_volume += std::abs(mesh.tet_volume(t));
  if (nt > 0) mean_volume /= nt;

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nt) * 16);
  for (int t = 0; t < nt; ++t) {
    const auto& tet = mesh.tets[t];
    const Vec3& p0 = mesh.vertices[tet[0]];
    Mat3 E;
    E.col(0) = mesh.vertices[tet[1]] - p0;
    E.col(1) = mesh.vertices[tet[2]] - p0;
    E.col(2) = mesh.vertices[tet[3]] - p0;
    const double vol = std::abs(E.determinant()) / 6.0;
    if (vol <= 1e-14 * mean_volume || vol == 0.0) {
      throw Error(ErrorKind::DegenerateTet, "tet " + std::to_string(t) + " has volume " + std::to_string(vol));
    }
    Mat3 Einv = E.inverse();
    std::array<Vec3, 4> grad;
    grad[1] = Einv.row(0).transpose();
    grad[2] = Einv.row(1).transpose();
    grad[3] = Einv.row(2).transpose();
    grad[0] = -(grad[1] + grad[2] + grad[3]);
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        triplets.emplace_back(tet[i], tet[j], vol * grad[i].dot(grad[j]));
      }
    }
  }
  StiffnessMatrix K(nv, nv);
  K.setFromTriplets(triplets.begin(), triplets.end());
  K.makeCompressed();
  return K;
}

Domain Domain::build(TetMesh mesh, double angle_threshold_deg) {
  Topology topo(mesh);
  FeatureSet fs = build_features(mesh, topo, angle_threshold_deg);
  return build(std::move(mesh), std::move(fs));
}

Domain Domain::build(TetMesh mesh, FeatureSet features) {
  Topology topo(mesh);
  StiffnessMatrix K = assemble_stiffness(mesh);
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = -lo;
  for (const auto& p : mesh.vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return Domain{std::move(mesh), std::move(topo), std::move(features), std::move(K), lo, hi};
}

BoundaryConditionSet::Kind BoundaryConditionSet::kind(int v) const {
  if (dirichlet.contains(v)) return Kind::Dirichlet;
  if (tangency.contains(v)) return Kind::Tangency;
  if (free_boundary.contains(v)) return Kind::Free;
  return Kind::None;
}

void SolverConfig::validate() const {
  if (!(cg_tolerance > 0.0)) throw Error(ErrorKind::InvalidArgument, "cg_tolerance must be positive");
  if (max_cg_iters < 0) throw Error(ErrorKind::InvalidArgument, "max_cg_iters must be non-negative");
  if (smoothing_sweeps < 0) throw Error(ErrorKind::InvalidArgument, "smoothing_sweeps must be non-negative");
  if (!(relaxation >= 0.0 && relaxation <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "relaxation must lie in [0, 1]");
  }
  if (!(convergence_delta >= 0.0)) throw Error(ErrorKind::InvalidArgument, "convergence_delta must be >= 0");
}

void update_projection(FrameField& field) {
  const std::size_t n = field.coeffs.size();
  const bool warm = field.frames.size() == n;
  field.frames.resize(n, Mat3::Identity());
  field.quality.assign(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) {
    const Coeffs& c = field.coeffs[v];
    if (c.norm() < 1e-9) {
      field.frames[v] = Mat3::Identity();
      continue;
    }
    Mat3 start = field.frames[v];
    Projection p = project_to_octahedral(c, warm ? &start : nullptr);
    field.frames[v] = p.frame.R;
    field.quality[v] = p.alignment;
  }
}

double dirichlet_energy(const StiffnessMatrix& K, std::span<const Coeffs> coeffs) {
  const Eigen::Index n = K.rows();
  if (static_cast<Eigen::Index>(coeffs.size()) != n) {
    throw Error(ErrorKind::CountMismatch, "coefficient count does not match the stiffness matrix");
  }
  double e = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (StiffnessMatrix::InnerIterator it(K, i); it; ++it) {
      e += it.value() * coeffs[i].dot(coeffs[it.col()]);
    }
  }
  return e;
}

Mat3 curve_frame(const Vec3& tangent, const Vec3& ray0, const Vec3& ray1) {
  const Vec3 t = tangent.normalized();
  Vec3 e1 = ray0 - ray0.dot(t) * t;
  if (e1.norm() < 1e-12) throw Error(ErrorKind::DegenerateTangent, "face ray parallel to the curve tangent");
  e1.normalize();
  const Vec3 e2 = t.cross(e1);
  const double psi1 = std::atan2(ray1.dot(e2), ray1.dot(e1));
  // Average in the quarter-turn sense: both rays are matched modulo 90 degrees.
  const std::complex<double> z = 1.0 + std::polar(1.0, 4.0 * psi1);
  const double psi = std::abs(z) < 1e-6 ? 0.0 : std::arg(z) / 4.0;
  const Vec3 a = std::cos(psi) * e1 + std::sin(psi) * e2;
  Mat3 R;
  R.col(0) = t;
  R.col(1) = a;
  R.col(2) = t.cross(a);
  return R;
}

std::vector<Coeffs> dirichlet_bc_on_curve(const FeatureCurve& curve) {
  std::vector<Coeffs> out;
  out.reserve(curve.size());
  for (std::size_t k = 0; k < curve.size(); ++k) {
    if (curve.tangents[k].norm() < 1e-9) {
      throw Error(ErrorKind::DegenerateTangent, "curve " + std::to_string(curve.id) + " has a zero tangent");
    }
    out.push_back(rotate_reference(curve_frame(curve.tangents[k], curve.rays[k][0], curve.rays[k][1])));
  }
  return out;
}

BoundaryConditionSet build_boundary_conditions(const Domain& domain) {
  const FeatureSet& fs = domain.features;
  BoundaryConditionSet bcs;
  std::map<int, Coeffs> corner_sum;
  for (const auto& curve : fs.curves) {
    const auto values = dirichlet_bc_on_curve(curve);
    for (std::size_t k = 0; k < curve.size(); ++k) {
      const int v = curve.vertices[k];
      if (fs.is_corner[v]) {
        auto [it, inserted] = corner_sum.try_emplace(v, Coeffs::Zero());
        it->second += values[k];
      } else {
        bcs.dirichlet[v] = values[k];
      }
    }
  }
  for (const auto& [v, sum] : corner_sum) {
    bcs.dirichlet[v] = project_to_octahedral(sum).coeffs;
  }
  for (int c : fs.corners) {
    if (!bcs.dirichlet.contains(c)) bcs.dirichlet[c] = reference_coeffs();
  }
  const int nv = static_cast<int>(domain.mesh.num_vertices());
  for (int v = 0; v < nv; ++v) {
    if (!domain.topology.is_boundary_vertex(v) || bcs.dirichlet.contains(v)) continue;
    bcs.tangency[v] = fs.vertex_normal[v];
  }
  return bcs;
}

namespace {

// Per-vertex parametrization x_v = B_v y_v + b_v of the constrained solution space.
struct Parametrization {
  std::vector<int> offset;  // first unknown, -1 for Dirichlet vertices
  std::vector<int> width;   // 0, 2 or 9
  std::vector<TangencyBasis> basis;
  int unknowns = 0;
};

Parametrization parametrize(std::size_t nv, const BoundaryConditionSet& bcs) {
  Parametrization p;
  p.offset.assign(nv, -1);
  p.width.assign(nv, 0);
  p.basis.resize(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    const int vi = static_cast<int>(v);
    if (bcs.dirichlet.contains(vi)) continue;
    p.offset[v] = p.unknowns;
    if (auto it = bcs.tangency.find(vi); it != bcs.tangency.end()) {
      p.basis[v] = tangency_basis(it->second);
      p.width[v] = 2;
    } else {
      p.width[v] = 9;
    }
    p.unknowns += p.width[v];
  }
  return p;
}

void check_bcs(const Domain& domain, const BoundaryConditionSet& bcs) {
  const int nv = static_cast<int>(domain.mesh.num_vertices());
  auto in_range = [nv](int v) { return v >= 0 && v < nv; };
  for (const auto& [v, c] : bcs.dirichlet) {
    if (!in_range(v)) throw Error(ErrorKind::IndexOutOfRange, "Dirichlet vertex out of range");
  }
  for (const auto& [v, n] : bcs.tangency) {
    if (!in_range(v)) throw Error(ErrorKind::IndexOutOfRange, "tangency vertex out of range");
    if (bcs.dirichlet.contains(v)) {
      throw Error(ErrorKind::ConflictingConstraint, "vertex " + std::to_string(v) + " is both Dirichlet and tangent");
    }
    if (n.norm() < 1e-12) throw Error(ErrorKind::InvalidArgument, "zero tangency normal");
  }
  for (int v : bcs.free_boundary) {
    if (!in_range(v)) throw Error(ErrorKind::IndexOutOfRange, "free vertex out of range");
  }
}

}  // namespace

std::vector<Coeffs> solve_constrained_laplace(const Domain& domain, const BoundaryConditionSet& bcs,
                                              const SolverConfig& config) {
  config.validate();
  check_bcs(domain, bcs);
  const StiffnessMatrix& K = domain.stiffness;
  const std::size_t nv = domain.mesh.num_vertices();
  const Parametrization p = parametrize(nv, bcs);

  // Known part of each vertex: Dirichlet value or tangency offset h0.
  std::vector<Coeffs> known(nv, Coeffs::Zero());
  for (const auto& [v, c] : bcs.dirichlet) known[v] = c;
  for (const auto& [v, n] : bcs.tangency) known[v] = p.basis[v].h0;

  auto B = [&](std::size_t v) {
    Eigen::Matrix<double, 9, Eigen::Dynamic> b(9, p.width[v]);
    if (p.width[v] == 9) {
      b.setIdentity();
    } else {
      b.col(0) = p.basis[v].h1;
      b.col(1) = p.basis[v].h2;
    }
    return b;
  };

  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p.unknowns);
  for (std::size_t i = 0; i < nv; ++i) {
    if (p.offset[i] < 0) continue;
    const auto Bi = B(i);
    Coeffs load = Coeffs::Zero();
    for (StiffnessMatrix::InnerIterator it(K, static_cast<Eigen::Index>(i)); it; ++it) {
      const auto j = static_cast<std::size_t>(it.col());
      const double kij = it.value();
      load += kij * known[j];
      if (p.offset[j] < 0) continue;
      Eigen::MatrixXd block = kij * (Bi.transpose() * B(j));
      for (int r = 0; r < block.rows(); ++r) {
        for (int c = 0; c < block.cols(); ++c) {
          if (block(r, c) != 0.0) triplets.emplace_back(p.offset[i] + r, p.offset[j] + c, block(r, c));
        }
      }
    }
    rhs.segment(p.offset[i], p.width[i]) = -(Bi.transpose() * load);
  }

  std::vector<Coeffs> x = known;
  if (p.unknowns > 0) {
    StiffnessMatrix A(p.unknowns, p.unknowns);
    A.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::ConjugateGradient<StiffnessMatrix, Eigen::Lower | Eigen::Upper, Eigen::DiagonalPreconditioner<double>> cg;
    cg.setTolerance(config.cg_tolerance);
    cg.setMaxIterations(config.max_cg_iters > 0 ? config.max_cg_iters : 10 * p.unknowns);
    cg.compute(A);
    Eigen::VectorXd y = cg.solve(rhs);
    if (cg.info() != Eigen::Success || !y.allFinite()) {
      throw Error(ErrorKind::CGDiverged, "conjugate gradient stopped after " + std::to_string(cg.iterations()) +
                                             " iterations at residual " + std::to_string(cg.error()));
    }
    for (std::size_t v = 0; v < nv; ++v) {
      if (p.offset[v] < 0) continue;
      if (p.width[v] == 9) {
        x[v] = y.segment<9>(p.offset[v]);
      } else {
        x[v] = p.basis[v].h0 + y[p.offset[v]] * p.basis[v].h1 + y[p.offset[v] + 1] * p.basis[v].h2;
      }
    }
  }
  return x;
}

FrameField solve_initial(const Domain& domain, const BoundaryConditionSet& bcs, const SolverConfig& config) {
  FrameField field;
  field.bcs = bcs;
  field.coeffs = solve_constrained_laplace(domain, bcs, config);
  for (const auto& [v, n] : bcs.tangency) {
    const TangencyBasis tb = tangency_basis(n);
    const Coeffs d = field.coeffs[v] - tb.h0;
    Eigen::Vector2d cs(d.dot(tb.h1), d.dot(tb.h2));
    const double r = cs.norm();
    cs = r > 1e-12 ? Eigen::Vector2d(cs * (kCircleRadius / r)) : Eigen::Vector2d(kCircleRadius, 0.0);
    field.coeffs[v] = tb.h0 + cs[0] * tb.h1 + cs[1] * tb.h2;
  }
  update_projection(field);
  return field;
}

FrameField smooth_nonlinear(const Domain& domain, FrameField field, const SolverConfig& config,
                            SmoothReport* report) {
  config.validate();
  check_bcs(domain, field.bcs);
  const StiffnessMatrix& K = domain.stiffness;
  const std::size_t nv = domain.mesh.num_vertices();
  if (field.coeffs.size() != nv) throw Error(ErrorKind::CountMismatch, "field size does not match the mesh");
  if (field.frames.size() != nv) update_projection(field);
  const Parametrization p = parametrize(nv, field.bcs);
  const double lambda = config.relaxation;

  SmoothReport rep;
  for (int sweep = 0; sweep < config.smoothing_sweeps; ++sweep) {
    double max_change = 0.0;
    for (std::size_t i = 0; i < nv; ++i) {
      if (p.offset[i] < 0) continue;
      Coeffs avg = Coeffs::Zero();
      double kii = 0.0;
      for (StiffnessMatrix::InnerIterator it(K, static_cast<Eigen::Index>(i)); it; ++it) {
        if (static_cast<std::size_t>(it.col()) == i) {
          kii = it.value();
        } else {
          avg -= it.value() * field.coeffs[it.col()];
        }
      }
      if (kii <= 0.0) continue;
      avg /= kii;

      Coeffs next;
      if (p.width[i] == 2) {
        const TangencyBasis& tb = p.basis[i];
        const Coeffs d = avg - tb.h0;
        Eigen::Vector2d plane(d.dot(tb.h1), d.dot(tb.h2));
        const double r = plane.norm();
        Eigen::Vector2d circle = r > 1e-12 ? Eigen::Vector2d(plane * (kCircleRadius / r)) : plane;
        Eigen::Vector2d cs = (1.0 - lambda) * plane + lambda * circle;
        next = tb.h0 + cs[0] * tb.h1 + cs[1] * tb.h2;
      } else if (avg.norm() > 1e-12 && lambda > 0.0) {
        Projection proj = project_to_octahedral(avg, &field.frames[i]);
        field.frames[i] = proj.frame.R;
        next = (1.0 - lambda) * avg + lambda * proj.coeffs;
      } else {
        next = avg;
      }
      max_change = std::max(max_change, (next - field.coeffs[i]).norm());
      field.coeffs[i] = next;
    }
    rep.sweeps = sweep + 1;
    rep.max_change = max_change;
    rep.energy_history.push_back(dirichlet_energy(K, field.coeffs));
    if (max_change < config.convergence_delta) {
      rep.converged = true;
      break;
    }
  }
  update_projection(field);
  rep.energy = dirichlet_energy(K, field.coeffs);
  if (report != nullptr) *report = std::move(rep);
  return field;
}

FrameField compute_field(const Domain& domain, const BoundaryConditionSet& bcs, const SolverConfig& config,
                         SmoothReport* report) {
  return smooth_nonlinear(domain, solve_initial(domain, bcs, config), config, report);
}

void add_internal_constraints(const Domain& domain, BoundaryConditionSet& bcs,
                              std::span<const InternalConstraint> constraints) {
  const int nv = static_cast<int>(domain.mesh.num_vertices());
  std::map<int, const InternalConstraint*> seen;
  for (const auto& c : constraints) {
    if (c.vertex < 0 || c.vertex >= nv) throw Error(ErrorKind::IndexOutOfRange, "constraint vertex out of range");
    if (domain.topology.is_boundary_vertex(c.vertex)) {
      throw Error(ErrorKind::InvalidArgument, "vertex " + std::to_string(c.vertex) + " lies on the boundary");
    }
    if (c.kind == InternalConstraint::Kind::TangencyDir && c.direction.norm() < 1e-12) {
      throw Error(ErrorKind::InvalidArgument, "zero tangency direction");
    }
    auto [it, inserted] = seen.try_emplace(c.vertex, &c);
    if (!inserted) {
      const InternalConstraint& o = *it->second;
      bool same = o.kind == c.kind;
      if (same && c.kind == InternalConstraint::Kind::TangencyDir) {
        same = std::abs(std::abs(o.direction.normalized().dot(c.direction.normalized())) - 1.0) < 1e-9;
      } else if (same) {
        same = (o.coeffs - c.coeffs).norm() < 1e-9;
      }
      if (!same) {
        throw Error(ErrorKind::ConflictingConstraint,
                    "vertex " + std::to_string(c.vertex) + " received two different constraints");
      }
      continue;
    }
    bcs.free_boundary.erase(c.vertex);
    if (c.kind == InternalConstraint::Kind::TangencyDir) {
      bcs.dirichlet.erase(c.vertex);
      bcs.tangency[c.vertex] = c.direction.normalized();
    } else {
      bcs.tangency.erase(c.vertex);
      bcs.dirichlet[c.vertex] = c.coeffs;
    }
  }
}

FrameField apply_internal_constraints(const Domain& domain, FrameField field,
                                      std::span<const InternalConstraint> constraints) {
  add_internal_constraints(domain, field.bcs, constraints);
  for (const auto& c : constraints) {
    if (c.kind == InternalConstraint::Kind::DirichletCoeffs) {
      field.coeffs[c.vertex] = c.coeffs;
      continue;
    }
    const TangencyBasis tb = tangency_basis(c.direction.normalized());
    const Coeffs d = field.coeffs[c.vertex] - tb.h0;
    Eigen::Vector2d cs(d.dot(tb.h1), d.dot(tb.h2));
    const double r = cs.norm();
    cs = r > 1e-12 ? Eigen::Vector2d(cs * (kCircleRadius / r)) : Eigen::Vector2d(kCircleRadius, 0.0);
    field.coeffs[c.vertex] = tb.h0 + cs[0] * tb.h1 + cs[1] * tb.h2;
  }
  update_projection(field);
  return field;
}

}  // namespace octaframe
