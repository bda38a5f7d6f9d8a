#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "octaframe/mesh.hpp"
#include "octaframe/singularity.hpp"
#include "octaframe/solver.hpp"

namespace octaframe {

/// ASCII MEDIT reader (1-based indices). Recognized sections: Vertices,
/// Tetrahedra, Triangles, Edges, Corners, MeshVersionFormatted, Dimension,
/// End. The result is finalized (see finalize_mesh). Throws ParseError with
/// the line number and section, IndexOutOfRange for bad vertex references.
TetMesh read_medit(const std::filesystem::path& path);
TetMesh parse_medit(std::istream& in, const std::string& source = "<stream>");

void write_medit(const TetMesh& mesh, const std::filesystem::path& path);

struct Polyline {
  std::vector<Vec3> points;
  int valence = 0;  // 10 * start + end for chains
  int is_35 = 0;
};

/// Legacy ASCII VTK POLYDATA with one line per polyline and the cell
/// scalars `valence` and `is_35`. Throws IoError.
void write_vtk_polylines(const std::vector<Polyline>& lines, const std::filesystem::path& path,
                         const std::string& title = "octaframe polylines");
std::vector<Polyline> read_vtk_polylines(const std::filesystem::path& path);

std::vector<Polyline> graph_polylines(const TetMesh& mesh, const SingularityGraph& graph);
void write_vtk_graph(const TetMesh& mesh, const SingularityGraph& graph, const std::filesystem::path& path);

/// Field text format: a header line `octaframe-field <n>`, then per vertex
/// the 9 coefficients and the 9 entries (row-major) of its projected frame,
/// all with 17 significant digits.
void write_field(const FrameField& field, const std::filesystem::path& path);
/// Throws CountMismatch if the vertex count differs from the mesh.
FrameField read_field(const std::filesystem::path& path, const TetMesh& mesh);

}  // namespace octaframe
