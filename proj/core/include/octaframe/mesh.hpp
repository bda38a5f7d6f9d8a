#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace octaframe {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct BoundaryTriangle {
  std::array<int, 3> v{};
  int patch = -1;
};

struct FeatureEdge {
  std::array<int, 2> v{};
  int curve = -1;
};

/// Tetrahedral domain. Boundary triangles are stored with outward orientation
/// once the mesh has gone through finalize_mesh(). Feature edges and corners
/// hold input tags (e.g. from a MEDIT file); detected features live in
/// FeatureSet.
struct TetMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 4>> tets;
  std::vector<BoundaryTriangle> boundary_tris;
  std::vector<FeatureEdge> feature_edges;
  std::vector<int> corners;

  [[nodiscard]] std::size_t num_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t num_tets() const { return tets.size(); }

  [[nodiscard]] double tet_volume(int t) const;
  [[nodiscard]] Vec3 tet_centroid(int t) const;
  [[nodiscard]] double mean_edge_length() const;
  [[nodiscard]] double bounding_box_diagonal() const;
};

/// Signed volume of the tetrahedron (a, b, c, d); positive when d lies on the
/// side of (a, b, c) that the right-hand normal points to.
double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Flips negatively oriented tets, then rebuilds the boundary triangle list
/// from the tets with outward orientation. Patch ids of input triangles are
/// carried over by vertex set. Throws DegenerateTet for zero-volume tets.
void finalize_mesh(TetMesh& mesh);

/// Outward local faces of a positively oriented tet; row k is the face
/// opposite local vertex k.
inline constexpr std::array<std::array<int, 3>, 4> kTetFaces{{
    {1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}}};

struct Face {
  std::array<int, 3> v{};               // outward w.r.t. tet[0]
  std::array<int, 2> tet{-1, -1};       // tet[1] == -1 on the boundary
  std::array<int, 2> local{-1, -1};     // local face index inside each tet
  [[nodiscard]] bool is_boundary() const { return tet[1] < 0; }
};

struct BoundaryEdge {
  std::array<int, 2> v{};
  /// faces[0] contains the directed edge v[0] -> v[1], faces[1] contains v[1] -> v[0].
  std::array<int, 2> faces{-1, -1};
};

/// Adjacency tables of a finalized TetMesh (tet<->face, vertex->tet,
/// vertex->vertex, boundary edges). Immutable after construction.
class Topology {
 public:
  explicit Topology(const TetMesh& mesh);

  [[nodiscard]] const std::vector<Face>& faces() const { return faces_; }
  [[nodiscard]] const Face& face(int f) const { return faces_[f]; }
  [[nodiscard]] int tet_face(int t, int k) const { return tet_faces_[t][k]; }
  [[nodiscard]] int tet_neighbor(int t, int k) const;
  [[nodiscard]] std::span<const int> vertex_tets(int v) const;
  [[nodiscard]] std::span<const int> vertex_neighbors(int v) const;
  [[nodiscard]] std::span<const int> vertex_boundary_faces(int v) const;
  [[nodiscard]] bool is_boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }

  [[nodiscard]] const std::vector<int>& boundary_faces() const { return boundary_faces_; }
  [[nodiscard]] const std::vector<int>& interior_faces() const { return interior_faces_; }
  [[nodiscard]] const std::vector<BoundaryEdge>& boundary_edges() const { return boundary_edges_; }

  /// Face id for an unordered vertex triple, or -1.
  [[nodiscard]] int find_face(int a, int b, int c) const;
  /// Boundary edge id for an unordered vertex pair, or -1.
  [[nodiscard]] int find_boundary_edge(int a, int b) const;
  /// Index of boundary face f inside mesh.boundary_tris, or -1.
  [[nodiscard]] int boundary_tri_of_face(int f) const { return face_to_btri_[f]; }
  [[nodiscard]] int face_of_boundary_tri(int i) const { return btri_to_face_[i]; }

  [[nodiscard]] std::size_t num_vertices() const { return boundary_vertex_.size(); }
  [[nodiscard]] std::size_t num_tets() const { return tet_faces_.size(); }

 private:
  std::vector<Face> faces_;
  std::vector<std::array<int, 4>> tet_faces_;
  std::vector<int> vt_offsets_, vt_data_;
  std::vector<int> vv_offsets_, vv_data_;
  std::vector<int> vbf_offsets_, vbf_data_;
  std::vector<std::uint8_t> boundary_vertex_;
  std::vector<int> boundary_faces_, interior_faces_;
  std::vector<BoundaryEdge> boundary_edges_;
  std::vector<int> face_to_btri_, btri_to_face_;
  std::unordered_map<std::uint64_t, int> face_lookup_;
  std::unordered_map<std::uint64_t, int> bedge_lookup_;
};

/// Euler characteristic V - E + F of the boundary surface.
int boundary_euler_characteristic(const Topology& topo);

/// Unit outward normal of a boundary triangle.
Vec3 triangle_normal(const TetMesh& mesh, const std::array<int, 3>& tri);
double triangle_area(const TetMesh& mesh, const std::array<int, 3>& tri);
Vec3 triangle_centroid(const TetMesh& mesh, const std::array<int, 3>& tri);

/// P1 barycentric coordinates of p in tet t.
Eigen::Vector4d barycentric(const TetMesh& mesh, int t, const Vec3& p);

}  // namespace octaframe
