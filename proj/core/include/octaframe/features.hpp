#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "octaframe/mesh.hpp"

namespace octaframe {

/// Local geometry of the two boundary faces meeting at a boundary edge.
/// Side 0 is the face containing the directed edge from -> to.
struct EdgeWedge {
  Vec3 tangent = Vec3::Zero();
  std::array<Vec3, 2> normals{Vec3::Zero(), Vec3::Zero()};
  /// In-face unit directions perpendicular to the edge, pointing into each face.
  std::array<Vec3, 2> rays{Vec3::Zero(), Vec3::Zero()};
  /// Interior (volume side) dihedral angle in degrees, in (0, 360).
  double interior_angle_deg = 180.0;
};

EdgeWedge edge_wedge(const TetMesh& mesh, const Topology& topo, int from, int to);

/// Signed angle (radians, in [0, 2*pi)) swept from ray `from` to ray `to`
/// when rotating through the material side of a wedge with edge tangent t.
double wedge_angle(const Vec3& tangent, const Vec3& from, const Vec3& to);

struct FeatureCurve {
  int id = -1;
  int source_tag = -1;
  std::vector<int> vertices;
  bool closed = false;
  /// Per-vertex unit tangent (direction of increasing vertex index).
  std::vector<Vec3> tangents;
  /// Per-vertex averaged side geometry: rays and normals of sides 0 and 1.
  std::vector<std::array<Vec3, 2>> rays;
  std::vector<std::array<Vec3, 2>> normals;
  double dihedral_angle = 180.0;  // degrees, averaged along the curve
  int target_valence = 2;

  [[nodiscard]] std::size_t size() const { return vertices.size(); }
};

struct SurfacePatch {
  int id = -1;
  std::vector<int> triangles;  // indices into TetMesh::boundary_tris
  std::vector<int> vertices;   // all vertices touched by the patch triangles
  std::vector<Vec3> normals;   // outward unit normal per entry of `vertices`
  double area = 0.0;
};

enum class FeatureSource { TagsAndDetection, TagsOnly, DetectionOnly };

/// Feature curves, corners and surface patches of a mesh boundary.
struct FeatureSet {
  std::vector<std::array<int, 2>> edges;  // feature edges (lower id first)
  std::vector<int> edge_curve;            // curve id per feature edge
  std::vector<double> edge_angle;         // interior dihedral per feature edge (deg)
  std::vector<FeatureCurve> curves;
  std::vector<SurfacePatch> patches;
  std::vector<int> corners;

  std::vector<int> triangle_patch;     // per TetMesh::boundary_tris entry
  std::vector<int> vertex_curve;       // curve id for curve vertices, -1 otherwise
  std::vector<int> vertex_curve_pos;   // position inside that curve
  std::vector<std::uint8_t> is_corner;
  std::vector<int> vertex_patch;       // patch id for patch-interior boundary vertices, -1 otherwise
  std::vector<Vec3> vertex_normal;     // unit outward normal for boundary vertices

  [[nodiscard]] bool is_feature_vertex(int v) const { return vertex_curve[v] >= 0 || is_corner[v] != 0; }
  [[nodiscard]] bool is_feature_edge(int a, int b) const;
  [[nodiscard]] double total_patch_area() const;
};

/// Bins an interior dihedral angle: [45,135) -> 1, [135,225) -> 2,
/// [225,315) -> 3, [315,360] -> 4. Throws DegenerateDihedral below 45 degrees.
int classify_feature_valence(double dihedral_deg);
int classify_feature_valence(const FeatureCurve& curve);

/// Boundary edges whose interior dihedral deviates from 180 degrees by more
/// than the threshold are features; tagged edges of the mesh are kept
/// according to `source`. Edges are chained into curves split at corners
/// (feature-graph degree != 2) and where the valence bin changes.
FeatureSet detect_features(const TetMesh& mesh, const Topology& topo, double angle_threshold_deg = 30.0,
                           FeatureSource source = FeatureSource::TagsAndDetection);

/// Input tags take precedence: TagsOnly when the mesh carries feature edges,
/// DetectionOnly otherwise.
FeatureSet build_features(const TetMesh& mesh, const Topology& topo, double angle_threshold_deg = 30.0);

}  // namespace octaframe
