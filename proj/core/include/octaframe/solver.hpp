#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "octaframe/features.hpp"
#include "octaframe/frame.hpp"
#include "octaframe/mesh.hpp"

namespace octaframe {

using StiffnessMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// P1 stiffness matrix of the scalar Laplacian (shared by all 9 channels).
/// Throws DegenerateTet if a tet volume is below 1e-14 of the mean volume.
StiffnessMatrix assemble_stiffness(const TetMesh& mesh);

/// Everything about the geometry a solve needs; immutable after build().
struct Domain {
  TetMesh mesh;
  Topology topology;
  FeatureSet features;
  StiffnessMatrix stiffness;
  Vec3 bbox_min = Vec3::Zero();
  Vec3 bbox_max = Vec3::Zero();

  static Domain build(TetMesh mesh, double angle_threshold_deg = 30.0);
  static Domain build(TetMesh mesh, FeatureSet features);
};

/// Constraint sets. Ordered containers keep every traversal deterministic.
struct BoundaryConditionSet {
  std::map<int, Coeffs> dirichlet;
  std::map<int, Vec3> tangency;
  std::set<int> free_boundary;

  enum class Kind { None, Dirichlet, Tangency, Free };
  [[nodiscard]] Kind kind(int v) const;
  [[nodiscard]] bool operator==(const BoundaryConditionSet&) const = default;
};

struct SolverConfig {
  double cg_tolerance = 1e-8;
  int max_cg_iters = 0;  // 0 means 10 * number of unknowns
  int smoothing_sweeps = 50;
  double relaxation = 0.95;  // weight of the projected frame in each update
  double convergence_delta = 1e-6;

  void validate() const;
};

/// Per-vertex coefficients plus the constraints they were solved under.
/// `frames` and `quality` cache the projection of each vertex.
struct FrameField {
  std::vector<Coeffs> coeffs;
  BoundaryConditionSet bcs;
  std::vector<Mat3> frames;
  std::vector<double> quality;

  [[nodiscard]] std::size_t size() const { return coeffs.size(); }
  [[nodiscard]] Frame frame(int v) const { return Frame{frames[v]}; }
};

/// Recomputes frames and quality (<c/|c|, P(c)>, 0 when |c| < 1e-9).
void update_projection(FrameField& field);

/// Sum over the nine channels of q^T K q.
double dirichlet_energy(const StiffnessMatrix& K, std::span<const Coeffs> coeffs);

/// Frame with one axis along `tangent`, the other two placed symmetrically
/// (in the quarter-turn sense) with respect to the two face rays.
Mat3 curve_frame(const Vec3& tangent, const Vec3& ray0, const Vec3& ray1);

/// Dirichlet values along a feature curve, one per curve vertex.
std::vector<Coeffs> dirichlet_bc_on_curve(const FeatureCurve& curve);

/// Feature curves and corners -> Dirichlet, other boundary vertices ->
/// tangency with their patch normal.
BoundaryConditionSet build_boundary_conditions(const Domain& domain);

/// Minimizer of the Dirichlet energy over fields that match the Dirichlet
/// values and lie in the tangency planes h0 + span(h1, h2) (circle relaxed).
/// Throws CGDiverged when conjugate gradient misses the tolerance.
std::vector<Coeffs> solve_constrained_laplace(const Domain& domain, const BoundaryConditionSet& bcs,
                                              const SolverConfig& config);

/// Linear initialization: 9-channel Laplace solve with Dirichlet vertices
/// eliminated and tangency vertices reduced to two unknowns; tangency
/// vertices are rescaled onto their constraint circle afterwards.
FrameField solve_initial(const Domain& domain, const BoundaryConditionSet& bcs, const SolverConfig& config);

struct SmoothReport {
  int sweeps = 0;
  bool converged = false;
  double max_change = 0.0;
  double energy = 0.0;
  std::vector<double> energy_history;  // after each sweep
};

/// Nonlinear Gauss-Seidel smoothing with relaxed projection onto the frame
/// manifold. Sweeps visit vertices in index order.
FrameField smooth_nonlinear(const Domain& domain, FrameField field, const SolverConfig& config,
                            SmoothReport* report = nullptr);

/// solve_initial followed by smooth_nonlinear.
FrameField compute_field(const Domain& domain, const BoundaryConditionSet& bcs, const SolverConfig& config,
                         SmoothReport* report = nullptr);

struct InternalConstraint {
  enum class Kind { TangencyDir, DirichletCoeffs };
  int vertex = -1;
  Kind kind = Kind::TangencyDir;
  Vec3 direction = Vec3::UnitZ();
  Coeffs coeffs = Coeffs::Zero();
};

/// Moves interior vertices into the Dirichlet or tangency sets. Throws
/// ConflictingConstraint when a vertex receives two different constraints
/// and InvalidArgument for boundary vertices.
FrameField apply_internal_constraints(const Domain& domain, FrameField field,
                                      std::span<const InternalConstraint> constraints);

/// Adds internal constraints to a constraint set (same rules as above).
void add_internal_constraints(const Domain& domain, BoundaryConditionSet& bcs,
                              std::span<const InternalConstraint> constraints);

}  // namespace octaframe
