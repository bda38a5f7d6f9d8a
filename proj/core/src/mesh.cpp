#include "octaframe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "octaframe/error.hpp"

namespace octaframe {
namespace {

std::uint64_t face_key(int a, int b, int c) {
  std::array<std::uint64_t, 3> s{static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(b),
                                 static_cast<std::uint64_t>(c)};
  std::sort(s.begin(), s.end());
  return (s[0] << 42) | (s[1] << 21) | s[2];
}

std::uint64_t edge_key(int a, int b) {
  auto lo = static_cast<std::uint64_t>(std::min(a, b));
  auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

void build_csr(std::size_t n, const std::vector<std::pair<int, int>>& pairs,
               std::vector<int>& offsets, std::vector<int>& data) {
  offsets.assign(n + 1, 0);
  for (const auto& [k, _] : pairs) ++offsets[k + 1];
  for (std::size_t i = 0; i < n; ++i) offsets[i + 1] += offsets[i];
  data.resize(pairs.size());
  std::vector<int> cursor(offsets.begin(), offsets.end() - 1);
  for (const auto& [k, v] : pairs) data[cursor[k]++] = v;
}

}  // namespace

double signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  return (b - a).dot((c - a).cross(d - a)) / 6.0;
}

double TetMesh::tet_volume(int t) const {
  const auto& tv = tets[t];
  return signed_volume(vertices[tv[0]], vertices[tv[1]], vertices[tv[2]], vertices[tv[3]]);
}

Vec3 TetMesh::tet_centroid(int t) const {
  const auto& tv = tets[t];
  return 0.25 * (vertices[tv[0]] + vertices[tv[1]] + vertices[tv[2]] + vertices[tv[3]]);
}

double TetMesh::mean_edge_length() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& t : tets) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        sum += (vertices[t[i]] - vertices[t[j]]).norm();
        ++n;
      }
    }
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double TetMesh::bounding_box_diagonal() const {
  if (vertices.empty()) return 0.0;
  Vec3 lo = vertices.front(), hi = vertices.front();
  for (const auto& p : vertices) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  return (hi - lo).norm();
}

void finalize_mesh(TetMesh& mesh) {
  const int nv = static_cast<int>(mesh.vertices.size());
  double mean_abs = 0.0;
  for (auto& t : mesh.tets) {
    for (int v : t) {
      if (v < 0 || v >= nv) {
        throw Error(ErrorKind::IndexOutOfRange, "tet references vertex " + std::to_string(v));
      }
    }
  }
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    mean_abs += std::abs(mesh.tet_volume(static_cast<int>(t)));
  }
  if (!mesh.tets.empty()) mean_abs /= static_cast<double>(mesh.tets.size());
  for (std::size_t t = 0; t < mesh.tets.size(); ++t) {
    double vol = mesh.tet_volume(static_cast<int>(t));
    if (std::abs(vol) <= 1e-14 * mean_abs) {
      throw Error(ErrorKind::DegenerateTet, "tet " + std::to_string(t) + " has zero volume");
    }
    if (vol < 0) std::swap(mesh.tets[t][2], mesh.tets[t][3]);
  }

  std::unordered_map<std::uint64_t, int> input_patch;
  for (const auto& bt : mesh.boundary_tris) {
    input_patch[face_key(bt.v[0], bt.v[1], bt.v[2])] = bt.patch;
  }

  // Count face occurrences, remember the first outward orientation.
  std::unordered_map<std::uint64_t, std::pair<int, std::array<int, 3>>> seen;
  std::vector<std::uint64_t> order;
  seen.reserve(mesh.tets.size() * 3);
  for (const auto& t : mesh.tets) {
    for (const auto& lf : kTetFaces) {
      std::array<int, 3> f{t[lf[0]], t[lf[1]], t[lf[2]]};
      auto key = face_key(f[0], f[1], f[2]);
      auto [it, inserted] = seen.try_emplace(key, 0, f);
      if (inserted) order.push_back(key);
      ++it->second.first;
    }
  }
  std::vector<BoundaryTriangle> boundary;
  for (auto key : order) {
    const auto& [count, f] = seen[key];
    if (count != 1) continue;
    BoundaryTriangle bt;
    bt.v = f;
    auto it = input_patch.find(key);
    bt.patch = it == input_patch.end() ? -1 : it->second;
    boundary.push_back(bt);
  }
  mesh.boundary_tris = std::move(boundary);
}

Topology::Topology(const TetMesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  const std::size_t nt = mesh.tets.size();
  tet_faces_.resize(nt);
  face_lookup_.reserve(nt * 3);

  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tv = mesh.tets[t];
    for (int k = 0; k < 4; ++k) {
      const auto& lf = kTetFaces[k];
      std::array<int, 3> f{tv[lf[0]], tv[lf[1]], tv[lf[2]]};
      auto key = face_key(f[0], f[1], f[2]);
      auto [it, inserted] = face_lookup_.try_emplace(key, static_cast<int>(faces_.size()));
      if (inserted) {
        Face face;
        face.v = f;
        face.tet = {static_cast<int>(t), -1};
        face.local = {k, -1};
        faces_.push_back(face);
      } else {
        Face& face = faces_[it->second];
        if (face.tet[1] >= 0) {
          throw Error(ErrorKind::NonManifold,
                      "face shared by more than two tets (tet " + std::to_string(t) + ")");
        }
        face.tet[1] = static_cast<int>(t);
        face.local[1] = k;
      }
      tet_faces_[t][k] = it->second;
    }
  }

  face_to_btri_.assign(faces_.size(), -1);
  boundary_vertex_.assign(nv, 0);
  for (std::size_t f = 0; f < faces_.size(); ++f) {
    if (faces_[f].is_boundary()) {
      boundary_faces_.push_back(static_cast<int>(f));
      for (int v : faces_[f].v) boundary_vertex_[v] = 1;
    } else {
      interior_faces_.push_back(static_cast<int>(f));
    }
  }

  btri_to_face_.assign(mesh.boundary_tris.size(), -1);
  for (std::size_t i = 0; i < mesh.boundary_tris.size(); ++i) {
    const auto& bt = mesh.boundary_tris[i];
    int f = find_face(bt.v[0], bt.v[1], bt.v[2]);
    if (f < 0 || !faces_[f].is_boundary()) {
      throw Error(ErrorKind::NonManifold,
                  "boundary triangle " + std::to_string(i) + " is not a boundary face of exactly one tet");
    }
    btri_to_face_[i] = f;
    face_to_btri_[f] = static_cast<int>(i);
  }
  if (!mesh.boundary_tris.empty() && mesh.boundary_tris.size() != boundary_faces_.size()) {
    throw Error(ErrorKind::OpenBoundary, "boundary triangle list does not cover the tet boundary");
  }

  // Boundary edges from the outward-oriented boundary faces.
  for (int f : boundary_faces_) {
    const auto& v = faces_[f].v;
    for (int i = 0; i < 3; ++i) {
      int a = v[i], b = v[(i + 1) % 3];
      auto key = edge_key(a, b);
      auto [it, inserted] = bedge_lookup_.try_emplace(key, static_cast<int>(boundary_edges_.size()));
      if (inserted) {
        BoundaryEdge e;
        e.v = {a, b};
        e.faces = {f, -1};
        boundary_edges_.push_back(e);
      } else {
        BoundaryEdge& e = boundary_edges_[it->second];
        if (e.faces[1] >= 0 || e.v[0] != b) {
          throw Error(ErrorKind::NonManifold, "boundary edge (" + std::to_string(a) + "," +
                                                  std::to_string(b) + ") is not two-manifold");
        }
        e.faces[1] = f;
      }
    }
  }
  for (const auto& e : boundary_edges_) {
    if (e.faces[1] < 0) {
      throw Error(ErrorKind::OpenBoundary, "boundary edge (" + std::to_string(e.v[0]) + "," +
                                               std::to_string(e.v[1]) + ") has a single face");
    }
  }

  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(nt * 4);
  for (std::size_t t = 0; t < nt; ++t) {
    for (int v : mesh.tets[t]) pairs.emplace_back(v, static_cast<int>(t));
  }
  build_csr(nv, pairs, vt_offsets_, vt_data_);

  pairs.clear();
  for (int f : boundary_faces_) {
    for (int v : faces_[f].v) pairs.emplace_back(v, f);
  }
  build_csr(nv, pairs, vbf_offsets_, vbf_data_);

  pairs.clear();
  for (const auto& tv : mesh.tets) {
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i != j) pairs.emplace_back(tv[i], tv[j]);
      }
    }
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  build_csr(nv, pairs, vv_offsets_, vv_data_);
}

int Topology::tet_neighbor(int t, int k) const {
  const Face& f = faces_[tet_faces_[t][k]];
  return f.tet[0] == t ? f.tet[1] : f.tet[0];
}

std::span<const int> Topology::vertex_tets(int v) const {
  return {vt_data_.data() + vt_offsets_[v], static_cast<std::size_t>(vt_offsets_[v + 1] - vt_offsets_[v])};
}

std::span<const int> Topology::vertex_neighbors(int v) const {
  return {vv_data_.data() + vv_offsets_[v], static_cast<std::size_t>(vv_offsets_[v + 1] - vv_offsets_[v])};
}

std::span<const int> Topology::vertex_boundary_faces(int v) const {
  return {vbf_data_.data() + vbf_offsets_[v],
          static_cast<std::size_t>(vbf_offsets_[v + 1] - vbf_offsets_[v])};
}

int Topology::find_face(int a, int b, int c) const {
  auto it = face_lookup_.find(face_key(a, b, c));
  return it == face_lookup_.end() ? -1 : it->second;
}

int Topology::find_boundary_edge(int a, int b) const {
  auto it = bedge_lookup_.find(edge_key(a, b));
  return it == bedge_lookup_.end() ? -1 : it->second;
}

int boundary_euler_characteristic(const Topology& topo) {
  int nv = 0;
  for (std::size_t v = 0; v < topo.num_vertices(); ++v) {
    if (topo.is_boundary_vertex(static_cast<int>(v))) ++nv;
  }
  return nv - static_cast<int>(topo.boundary_edges().size()) +
         static_cast<int>(topo.boundary_faces().size());
}

Vec3 triangle_normal(const TetMesh& mesh, const std::array<int, 3>& tri) {
  const Vec3& a = mesh.vertices[tri[0]];
  return (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a).normalized();
}

double triangle_area(const TetMesh& mesh, const std::array<int, 3>& tri) {
  const Vec3& a = mesh.vertices[tri[0]];
  return 0.5 * (mesh.vertices[tri[1]] - a).cross(mesh.vertices[tri[2]] - a).norm();
}

Vec3 triangle_centroid(const TetMesh& mesh, const std::array<int, 3>& tri) {
  return (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
}

Eigen::Vector4d barycentric(const TetMesh& mesh, int t, const Vec3& p) {
  const auto& tv = mesh.tets[t];
  const Vec3& a = mesh.vertices[tv[0]];
  Mat3 m;
  m.col(0) = mesh.vertices[tv[1]] - a;
  m.col(1) = mesh.vertices[tv[2]] - a;
  m.col(2) = mesh.vertices[tv[3]] - a;
  Vec3 l = m.partialPivLu().solve(p - a);
  return {1.0 - l.sum(), l[0], l[1], l[2]};
}

}  // namespace octaframe
