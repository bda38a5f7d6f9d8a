#pragma once

#include <vector>

#include "octaframe/solver.hpp"

namespace octaframe {

/// Containing tet of p (barycentric coordinates >= -1e-10), found by walking
/// from `hint` toward the most negative barycentric coordinate, with an
/// exhaustive search when the walk leaves the mesh or cycles. -1 if outside.
int locate_point(const Domain& domain, const Vec3& p, int hint = 0);

struct FrameSample {
  Frame frame;
  Coeffs coeffs = Coeffs::Zero();
  double quality = 0.0;
  int tet = -1;
};

/// Barycentric interpolation of the coefficients, then projection
/// (warm-started from `warm` when given). Throws OutsideMesh.
FrameSample interpolate_frame(const Domain& domain, const FrameField& field, const Vec3& p, int hint = 0,
                              const Mat3* warm = nullptr);

struct TracerConfig {
  double step = 0.0;        // 0 means 0.5 * mean edge length
  double max_length = 0.0;  // 0 means 20 * bounding box diagonal
  double singular_quality_cutoff = 0.5;
  /// Consecutive directions with a smaller dot product abort the trace.
  double min_direction_dot = 0.5;

  /// Copy with the mesh-dependent defaults filled in.
  [[nodiscard]] TracerConfig resolved(const TetMesh& mesh) const;
};

enum class Termination { ExitedBoundary, MaxLength, HitSingularRegion };
const char* to_string(Termination t);

struct Streamline {
  std::vector<Vec3> points;
  std::vector<Vec3> directions;  // unit, one per point
  Vec3 seed = Vec3::Zero();
  Vec3 seed_direction = Vec3::Zero();
  Termination termination = Termination::ExitedBoundary;
  double length = 0.0;
  double min_quality = 1.0;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// RK4 integration of the frame axis closest to the running direction. Each
/// stage direction is the frame axis closest to the previous stage's. When
/// the trace leaves the mesh the last step is shortened (bisection on its
/// length) so that it ends on the boundary.
/// Throws SeedOutside when p0 is not inside the mesh.
Streamline trace(const Domain& domain, const FrameField& field, const Vec3& p0, const Vec3& v0,
                 const TracerConfig& config = {});

}  // namespace octaframe
