#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "octaframe/singularity.hpp"
#include "octaframe/streamline.hpp"

namespace octaframe {

enum class Strategy { ExtrudeCurves, ExtrudeNodes, Snap };
const char* to_string(Strategy s);

struct SnapTarget {
  int vertex = -1;
  bool on_feature = false;  // feature curve or corner vertex
};

/// One chain relocated onto the boundary: its two snapped extremities and
/// the boundary-edge path joining them (path.front() == targets[0].vertex).
struct SnapAssignment {
  int chain = -1;
  std::array<SnapTarget, 2> targets;
  std::vector<int> path;
};

struct TracedLine {
  int source = -1;  // curve id or chain id
  int sample = -1;  // curve vertex position, or 0 / 1 for the chain start / end
  Streamline line;
};

struct CorrectionPlan {
  Strategy strategy = Strategy::Snap;
  bool applicable = true;
  std::vector<InternalConstraint> constraints;
  std::vector<SnapAssignment> snaps;
  /// Rewritten constraint set (snapping only).
  std::optional<BoundaryConditionSet> boundary_conditions;
  std::vector<TracedLine> streamlines;
  std::vector<std::string> diagnostics;
  std::vector<std::string> failures;  // also listed in diagnostics
  int snap_iterations = 0;

  void fail(std::string message);
};

/// Signed frame axes orthogonal to the curve tangent at curve vertex
/// `sample` lying strictly inside the interior wedge, at least `margin_deg`
/// away from both face rays. Throws WedgeMismatch when their number is not
/// target_valence - 1, InvalidArgument for target_valence < 2.
std::vector<Vec3> extrusion_directions(const FeatureCurve& curve, int sample, const Frame& frame,
                                       double margin_deg = 15.0);

/// Nearest mesh vertex to p among the vertices of its containing tet and
/// their one-rings. -1 outside the mesh.
int nearest_vertex(const Domain& domain, const Vec3& p, int hint = 0);

struct ExtrusionOptions {
  TracerConfig tracer;
  double merge_angle_deg = 10.0;
  double wedge_margin_deg = 15.0;
  /// Node streamlines passing closer than this factor times the mean edge
  /// length to another chain hit that singularity.
  double singular_clearance = 1.0;
};

/// Sheets swept from every non-corner vertex of the curves with valence >= 2.
/// Each streamline point adds a tangency constraint t_e x v_k at its nearest
/// interior vertex.
CorrectionPlan extrude_feature_curves(const Domain& domain, const FrameField& field,
                                      const ExtrusionOptions& options = {});

/// Streamlines from both ends of every 3-5 chain along the stable direction.
/// Each streamline point adds axisymmetric Dirichlet coefficients at its
/// nearest interior vertex. A streamline reaching another chain is cut there
/// and marked HitSingularRegion.
CorrectionPlan extrude_singular_nodes(const Domain& domain, const FrameField& field, const SingularityGraph& graph,
                                      const ExtrusionOptions& options = {});

struct SnapOptions {
  double free_radius = 0.0;  // 0 means 3 * mean edge length
};

/// Boundary ends of 3-5 chains go to the nearest feature vertex, interior
/// ends to the nearest boundary vertex; chains sharing a snapped junction
/// follow. Paths are shortest boundary-edge paths. Throws NoBoundaryPath.
CorrectionPlan snap_35_curves(const Domain& domain, const FrameField& field, const SingularityGraph& graph,
                              const SnapOptions& options = {});

/// Path vertices get the frame (t, (n - b)/sqrt2, (n + b)/sqrt2) with b = t x n,
/// feature curves are split at snapped vertices and re-interpolated, and
/// tangency vertices within `free_radius` (boundary-edge distance) of a path
/// become free.
BoundaryConditionSet build_snapped_bcs(const Domain& domain, const BoundaryConditionSet& bcs,
                                       const std::vector<SnapAssignment>& snaps, double free_radius);

/// Frame used on snapped paths.
Mat3 snapped_frame(const Vec3& tangent, const Vec3& normal);

struct CorrectionResult {
  FrameField field;
  SingularityGraph graph;
  SmoothReport smoothing;
};

/// Re-solves with the plan's constraints. Throws NonApplicable for a
/// non-applicable plan without touching anything.
CorrectionResult apply_plan(const Domain& domain, const FrameField& field, const CorrectionPlan& plan,
                            const SolverConfig& config);

}  // namespace octaframe
