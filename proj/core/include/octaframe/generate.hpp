#pragma once

#include "octaframe/mesh.hpp"

namespace octaframe {

enum class BoxDeformation { None, Bulge };

struct BoxOptions {
  Vec3 extent = Vec3::Ones();
  BoxDeformation deformation = BoxDeformation::None;
  /// Peak vertical displacement of the top face center for Bulge.
  double amplitude = 0.0;
};

/// Structured box [0, extent] with nx * ny * nz cells. Every cell is split
/// into 6 tets around its diagonal from the lowest to the highest corner
/// (one tet per axis ordering), so neighbouring cells share face diagonals.
/// The 12 box edges are tagged as feature curves 0..11 and the 8 box
/// vertices as corners; boundary patches are 0..5 for x-, x+, y-, y+, z-, z+.
/// Bulge moves each vertex up by amplitude * (z / lz) * sin(pi x / lx) * sin(pi y / ly).
/// Throws InvalidArgument unless nx, ny, nz >= 2.
TetMesh generate_box(int nx, int ny, int nz, const BoxOptions& options = {});

}  // namespace octaframe
