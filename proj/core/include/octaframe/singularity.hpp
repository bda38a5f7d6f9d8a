#pragma once

#include <array>
#include <optional>
#include <vector>

#include "octaframe/solver.hpp"

namespace octaframe {

/// Valence reported for holonomies that are not quarter turns.
inline constexpr int kOtherValence = 0;

/// Frames used for matching: the projected frame when quality >= 0.5,
/// otherwise the projection of the one-ring average (hot spot). Vertices
/// whose coefficients cannot be projected either way are flagged invalid.
struct MatchingFrames {
  std::vector<Mat3> frames;
  std::vector<std::uint8_t> valid;
  std::vector<int> hot_spots;
  std::vector<int> unprojectable;
};

MatchingFrames matching_frames(const Domain& domain, const FrameField& field, double hot_spot_quality = 0.5);

struct SingularFace {
  int face = -1;                     // Topology face id
  std::array<int, 3> triangle{};     // loop order; the normal follows the right-hand rule
  std::array<int, 2> tets{-1, -1};   // tets[1] == -1 for boundary faces
  int group_rotation = 0;            // holonomy around the loop (octahedral group index)
  /// +1 or -1 for a quarter turn in the positive / negative sense about the
  /// face normal (index +1/4 / -1/4), 0 for any other holonomy.
  int index_quarters = 0;
  Vec3 axis = Vec3::Zero();          // world axis of the holonomy, oriented so the turn is +90 degrees

  [[nodiscard]] bool is_quarter_turn() const { return index_quarters != 0; }
  /// 4 - 4 * index: 3 for +1/4, 5 for -1/4, kOtherValence otherwise.
  [[nodiscard]] int valence() const;
};

/// Holonomy of the loop triangle[0] -> triangle[1] -> triangle[2] -> triangle[0].
/// Returns nullopt for a trivial holonomy or when a vertex frame is invalid.
std::optional<SingularFace> face_singularity(const Domain& domain, const MatchingFrames& frames, int face);

struct ChainEndpoint {
  enum class Kind { BoundaryNode, Junction, Closed, Defect };
  Kind kind = Kind::Closed;
  int node = -1;  // boundary node or junction id
  Vec3 position = Vec3::Zero();
};

struct SingularChain {
  int id = -1;
  std::vector<int> tets;   // traversed tets in order
  std::vector<int> faces;  // indices into SingularityGraph::faces, in traversal order
  int valence_start = kOtherValence;
  int valence_end = kOtherValence;
  ChainEndpoint start, end;
  bool is_35 = false;

  /// Chain geometry: endpoint positions joined through the face centroids.
  [[nodiscard]] std::vector<Vec3> polyline(const TetMesh& mesh, const std::vector<SingularFace>& faces) const;
};

struct JunctionNode {
  int id = -1;
  int tet = -1;
  Vec3 position = Vec3::Zero();
  std::vector<int> chains;
};

struct BoundaryNode {
  int id = -1;
  int face = -1;  // boundary face (Topology id) pierced by the chain
  Vec3 position = Vec3::Zero();
  int chain = -1;
};

struct SingularityGraph {
  std::vector<SingularFace> faces;
  std::vector<SingularChain> chains;
  std::vector<JunctionNode> junctions;
  std::vector<BoundaryNode> boundary_nodes;
  std::vector<int> defect_tets;      // tets with exactly one singular face
  std::vector<int> hot_spots;
  std::vector<int> unprojectable;

  [[nodiscard]] std::size_t num_35() const;
};

/// Classifies every face, chains tets with two singular faces, and turns
/// tets with three or more singular faces into junctions. Chains are
/// oriented so that the smaller endpoint key comes first.
SingularityGraph extract_graph(const Domain& domain, const FrameField& field);

/// Chains whose two end valences are 3 and 5.
std::vector<SingularChain> detect_35(const SingularityGraph& graph);

enum class ChainEnd { Start, End };

/// Frame axis left invariant by the holonomy of the chain face at the given
/// end, pointing from that end into the chain (into the volume at boundary
/// nodes). Throws AmbiguousAxis when that holonomy is not a quarter turn.
Vec3 stable_direction(const Domain& domain, const SingularityGraph& graph, const SingularChain& chain, ChainEnd end);

/// Cross-field charges on the boundary surface. The field is restricted to
/// each boundary triangle (axis closest to the normal dropped) and the
/// charge of a vertex is the cross rotation around its triangle fan plus
/// its angle defect, in quarter turns.
struct SurfaceCharge {
  int vertex = -1;
  int patch = -1;  // -1 for vertices on feature curves or corners
  int quarters = 0;
};

struct SurfaceComponent {
  std::vector<int> triangles;  // indices into TetMesh::boundary_tris
  int euler_characteristic = 0;
  int total_quarters = 0;      // sum of charges; equals 4 * euler_characteristic
};

struct SurfaceIndices {
  std::vector<SurfaceCharge> charges;  // nonzero charges only, by vertex id
  std::vector<SurfaceComponent> components;
  /// Largest distance of a raw charge from its quarter; ~1e-12 in practice.
  double max_rounding = 0.0;

  [[nodiscard]] std::vector<SurfaceCharge> patch_charges(int patch) const;
};

SurfaceIndices surface_cross_indices(const Domain& domain, const FrameField& field);

}  // namespace octaframe
