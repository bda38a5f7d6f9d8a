#include "octaframe/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "octaframe/error.hpp"

namespace octaframe {

TetMesh generate_box(int nx, int ny, int nz, const BoxOptions& options) {
  if (nx < 2 || ny < 2 || nz < 2) throw Error(ErrorKind::InvalidArgument, "box resolution must be at least 2");
  if ((options.extent.array() <= 0.0).any()) throw Error(ErrorKind::InvalidArgument, "box extent must be positive");

  const std::array<int, 3> n{nx, ny, nz};
  auto id = [&](int i, int j, int k) { return (k * (ny + 1) + j) * (nx + 1) + i; };

  TetMesh mesh;
  mesh.vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        Vec3 p(options.extent.x() * i / nx, options.extent.y() * j / ny, options.extent.z() * k / nz);
        if (options.deformation == BoxDeformation::Bulge) {
          const double s = std::sin(std::numbers::pi * i / nx) * std::sin(std::numbers::pi * j / ny);
          p.z() += options.amplitude * (static_cast<double>(k) / nz) * s;
        }
        mesh.vertices.push_back(p);
      }
    }
  }

  static constexpr std::array<std::array<int, 3>, 6> kOrders{
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (const auto& order : kOrders) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> tet{};
          tet[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[order[s]];
            tet[s + 1] = id(c[0], c[1], c[2]);
          }
          mesh.tets.push_back(tet);
        }
      }
    }
  }

  // Quads split along the low-to-high diagonal, matching the tet faces.
  auto add_quad = [&](int a, int b, int c, int d, int patch) {
    mesh.boundary_tris.push_back({{a, b, c}, patch});
    mesh.boundary_tris.push_back({{a, c, d}, patch});
  };
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      add_quad(id(0, j, k), id(0, j + 1, k), id(0, j + 1, k + 1), id(0, j, k + 1), 0);
      add_quad(id(nx, j, k), id(nx, j + 1, k), id(nx, j + 1, k + 1), id(nx, j, k + 1), 1);
    }
  }
  for (int k = 0; k < nz; ++k) {
    for (int i = 0; i < nx; ++i) {
      add_quad(id(i, 0, k), id(i + 1, 0, k), id(i + 1, 0, k + 1), id(i, 0, k + 1), 2);
      add_quad(id(i, ny, k), id(i + 1, ny, k), id(i + 1, ny, k + 1), id(i, ny, k + 1), 3);
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      add_quad(id(i, j, 0), id(i + 1, j, 0), id(i + 1, j + 1, 0), id(i, j + 1, 0), 4);
      add_quad(id(i, j, nz), id(i + 1, j, nz), id(i + 1, j + 1, nz), id(i, j + 1, nz), 5);
    }
  }

  int curve = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
    for (int s1 = 0; s1 <= 1; ++s1) {
      for (int s2 = 0; s2 <= 1; ++s2) {
        std::array<int, 3> c{};
        c[a1] = s1 * n[a1];
        c[a2] = s2 * n[a2];
        for (int t = 0; t < n[axis]; ++t) {
          c[axis] = t;
          const int v0 = id(c[0], c[1], c[2]);
          c[axis] = t + 1;
          mesh.feature_edges.push_back({{v0, id(c[0], c[1], c[2])}, curve});
        }
        ++curve;
      }
    }
  }
  for (int k : {0, nz}) {
    for (int j : {0, ny}) {
      for (int i : {0, nx}) mesh.corners.push_back(id(i, j, k));
    }
  }
  finalize_mesh(mesh);
  return mesh;
}

}  // namespace octaframe
