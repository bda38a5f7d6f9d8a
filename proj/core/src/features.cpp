#include "octaframe/features.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include <Eigen/Geometry>

#include "octaframe/error.hpp"

namespace octaframe {
namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

int third_vertex(const std::array<int, 3>& f, int a, int b) {
  for (int v : f) {
    if (v != a && v != b) return v;
  }
  return -1;
}

std::array<int, 2> sorted_pair(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

}  // namespace

double wedge_angle(const Vec3& tangent, const Vec3& from, const Vec3& to) {
  double a = std::atan2(-from.cross(to).dot(tangent), from.dot(to));
  if (a < 0) a += 2.0 * std::numbers::pi;
  return a;
}

EdgeWedge edge_wedge(const TetMesh& mesh, const Topology& topo, int from, int to) {
  int e = topo.find_boundary_edge(from, to);
  if (e < 0) throw Error(ErrorKind::InvalidArgument, "not a boundary edge");
  const BoundaryEdge& be = topo.boundary_edges()[e];
  std::array<int, 2> faces = be.faces;
  if (be.v[0] != from) std::swap(faces[0], faces[1]);

  EdgeWedge w;
  const Vec3& a = mesh.vertices[from];
  Vec3 t = mesh.vertices[to] - a;
  if (t.norm() < 1e-300) throw Error(ErrorKind::DegenerateTangent, "zero-length boundary edge");
  w.tangent = t.normalized();
  for (int s = 0; s < 2; ++s) {
    const Face& f = topo.face(faces[s]);
    w.normals[s] = triangle_normal(mesh, f.v);
    Vec3 c = mesh.vertices[third_vertex(f.v, from, to)] - a;
    w.rays[s] = (c - c.dot(w.tangent) * w.tangent).normalized();
  }
  w.interior_angle_deg = wedge_angle(w.tangent, w.rays[0], w.rays[1]) * kRadToDeg;
  return w;
}

int classify_feature_valence(double dihedral_deg) {
  if (!(dihedral_deg >= 45.0)) {
    throw Error(ErrorKind::DegenerateDihedral,
                "interior dihedral " + std::to_string(dihedral_deg) + " deg is below 45 deg");
  }
  if (dihedral_deg < 135.0) return 1;
  if (dihedral_deg < 225.0) return 2;
  if (dihedral_deg < 315.0) return 3;
  return 4;
}

int classify_feature_valence(const FeatureCurve& curve) {
  return classify_feature_valence(curve.dihedral_angle);
}

bool FeatureSet::is_feature_edge(int a, int b) const {
  auto p = sorted_pair(a, b);
  return std::binary_search(edges.begin(), edges.end(), p);
}

double FeatureSet::total_patch_area() const {
  double s = 0.0;
  for (const auto& p : patches) s += p.area;
  return s;
}

FeatureSet detect_features(const TetMesh& mesh, const Topology& topo, double angle_threshold_deg,
                           FeatureSource source) {
  if (!(angle_threshold_deg > 0.0 && angle_threshold_deg < 180.0)) {
    throw Error(ErrorKind::InvalidArgument, "angle threshold must lie in (0, 180)");
  }
  const int nv = static_cast<int>(mesh.vertices.size());
  FeatureSet fs;

  std::map<std::array<int, 2>, int> tagged;  // edge -> source tag
  if (source != FeatureSource::DetectionOnly) {
    for (const auto& fe : mesh.feature_edges) {
      if (topo.find_boundary_edge(fe.v[0], fe.v[1]) < 0) {
        throw Error(ErrorKind::InvalidArgument, "tagged feature edge (" + std::to_string(fe.v[0]) + "," +
                                                    std::to_string(fe.v[1]) + ") is not a boundary edge");
      }
      tagged.emplace(sorted_pair(fe.v[0], fe.v[1]), fe.curve);
    }
  }

  std::map<std::array<int, 2>, int> feature;  // edge -> tag (-1 if detected)
  for (const auto& [e, tag] : tagged) feature.emplace(e, tag);
  if (source != FeatureSource::TagsOnly) {
    for (const auto& be : topo.boundary_edges()) {
      EdgeWedge w = edge_wedge(mesh, topo, be.v[0], be.v[1]);
      if (std::abs(w.interior_angle_deg - 180.0) > angle_threshold_deg) {
        feature.emplace(sorted_pair(be.v[0], be.v[1]), -1);
      }
    }
  }

  fs.edges.reserve(feature.size());
  std::vector<int> edge_tag;
  std::vector<int> edge_bin;
  for (const auto& [e, tag] : feature) {
    fs.edges.push_back(e);
    edge_tag.push_back(tag);
    double ang = edge_wedge(mesh, topo, e[0], e[1]).interior_angle_deg;
    fs.edge_angle.push_back(ang);
    edge_bin.push_back(classify_feature_valence(ang));
  }
  fs.edge_curve.assign(fs.edges.size(), -1);

  // Feature graph.
  std::vector<std::vector<std::pair<int, int>>> adj(nv);  // (neighbor, edge index)
  for (std::size_t i = 0; i < fs.edges.size(); ++i) {
    adj[fs.edges[i][0]].emplace_back(fs.edges[i][1], static_cast<int>(i));
    adj[fs.edges[i][1]].emplace_back(fs.edges[i][0], static_cast<int>(i));
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());

  fs.is_corner.assign(nv, 0);
  for (int v = 0; v < nv; ++v) {
    if (adj[v].empty()) continue;
    if (adj[v].size() != 2) {
      fs.is_corner[v] = 1;
    } else if (edge_bin[adj[v][0].second] != edge_bin[adj[v][1].second]) {
      fs.is_corner[v] = 1;
    }
  }
  if (source != FeatureSource::DetectionOnly) {
    for (int c : mesh.corners) {
      if (c >= 0 && c < nv && !adj[c].empty()) fs.is_corner[c] = 1;
    }
  }

  auto finish_curve = [&](FeatureCurve& curve, const std::vector<int>& edge_ids) {
    curve.id = static_cast<int>(fs.curves.size());
    double sum = 0.0;
    for (int e : edge_ids) {
      fs.edge_curve[e] = curve.id;
      sum += fs.edge_angle[e];
    }
    curve.source_tag = edge_tag[edge_ids.front()];
    curve.dihedral_angle = sum / static_cast<double>(edge_ids.size());
    curve.target_valence = classify_feature_valence(curve.dihedral_angle);

    const std::size_t n = curve.vertices.size();
    curve.tangents.assign(n, Vec3::Zero());
    curve.rays.assign(n, {Vec3::Zero(), Vec3::Zero()});
    curve.normals.assign(n, {Vec3::Zero(), Vec3::Zero()});
    const std::size_t nseg = curve.closed ? n : n - 1;
    for (std::size_t i = 0; i < nseg; ++i) {
      int a = curve.vertices[i], b = curve.vertices[(i + 1) % n];
      EdgeWedge w = edge_wedge(mesh, topo, a, b);
      for (std::size_t k : {i, (i + 1) % n}) {
        curve.tangents[k] += w.tangent;
        for (int s = 0; s < 2; ++s) {
          curve.rays[k][s] += w.rays[s];
          curve.normals[k][s] += w.normals[s];
        }
      }
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (curve.tangents[k].norm() < 1e-9) {
        throw Error(ErrorKind::DegenerateTangent,
                    "curve " + std::to_string(curve.id) + " folds back at vertex " +
                        std::to_string(curve.vertices[k]));
      }
      curve.tangents[k].normalize();
      for (int s = 0; s < 2; ++s) {
        Vec3 r = curve.rays[k][s];
        r -= r.dot(curve.tangents[k]) * curve.tangents[k];
        curve.rays[k][s] = r.normalized();
        curve.normals[k][s].normalize();
      }
    }
    fs.curves.push_back(std::move(curve));
  };

  std::vector<char> used(fs.edges.size(), 0);
  auto walk = [&](int start, int first_edge, int next) {
    FeatureCurve curve;
    std::vector<int> edge_ids;
    curve.vertices.push_back(start);
    int prev = start, cur = next, e = first_edge;
    while (true) {
      used[e] = 1;
      edge_ids.push_back(e);
      if (cur == start) {
        curve.closed = true;
        break;
      }
      curve.vertices.push_back(cur);
      if (fs.is_corner[cur]) break;
      int nxt = -1, ne = -1;
      for (const auto& [w, ei] : adj[cur]) {
        if (!used[ei] && !(w == prev && ei == e)) {
          nxt = w;
          ne = ei;
          break;
        }
      }
      if (nxt < 0) break;
      prev = cur;
      cur = nxt;
      e = ne;
    }
    finish_curve(curve, edge_ids);
  };

  for (int v = 0; v < nv; ++v) {
    if (!fs.is_corner[v]) continue;
    for (const auto& [w, ei] : adj[v]) {
      if (!used[ei]) walk(v, ei, w);
    }
  }
  for (int v = 0; v < nv; ++v) {
    for (const auto& [w, ei] : adj[v]) {
      if (!used[ei]) walk(v, ei, w);
    }
  }

  fs.vertex_curve.assign(nv, -1);
  fs.vertex_curve_pos.assign(nv, -1);
  for (const auto& c : fs.curves) {
    for (std::size_t i = 0; i < c.vertices.size(); ++i) {
      int v = c.vertices[i];
      if (fs.is_corner[v]) continue;
      fs.vertex_curve[v] = c.id;
      fs.vertex_curve_pos[v] = static_cast<int>(i);
    }
  }
  for (int v = 0; v < nv; ++v) {
    if (fs.is_corner[v]) fs.corners.push_back(v);
  }

  // Patches: flood fill across non-feature boundary edges.
  const std::size_t nb = mesh.boundary_tris.size();
  fs.triangle_patch.assign(nb, -1);
  std::vector<std::vector<int>> tri_adj(nb);
  for (const auto& be : topo.boundary_edges()) {
    if (fs.is_feature_edge(be.v[0], be.v[1])) continue;
    int t0 = topo.boundary_tri_of_face(be.faces[0]);
    int t1 = topo.boundary_tri_of_face(be.faces[1]);
    tri_adj[t0].push_back(t1);
    tri_adj[t1].push_back(t0);
  }
  for (std::size_t seed = 0; seed < nb; ++seed) {
    if (fs.triangle_patch[seed] >= 0) continue;
    SurfacePatch patch;
    patch.id = static_cast<int>(fs.patches.size());
    std::vector<int> stack{static_cast<int>(seed)};
    fs.triangle_patch[seed] = patch.id;
    while (!stack.empty()) {
      int t = stack.back();
      stack.pop_back();
      patch.triangles.push_back(t);
      for (int u : tri_adj[t]) {
        if (fs.triangle_patch[u] < 0) {
          fs.triangle_patch[u] = patch.id;
          stack.push_back(u);
        }
      }
    }
    std::sort(patch.triangles.begin(), patch.triangles.end());
    std::map<int, Vec3> acc;
    for (int t : patch.triangles) {
      const auto& tri = mesh.boundary_tris[t].v;
      double area = triangle_area(mesh, tri);
      patch.area += area;
      Vec3 n = triangle_normal(mesh, tri);
      for (int v : tri) {
        auto [it, _] = acc.try_emplace(v, Vec3::Zero());
        it->second += area * n;
      }
    }
    for (const auto& [v, n] : acc) {
      patch.vertices.push_back(v);
      patch.normals.push_back(n.normalized());
    }
    fs.patches.push_back(std::move(patch));
  }

  fs.vertex_patch.assign(nv, -1);
  fs.vertex_normal.assign(nv, Vec3::Zero());
  for (const auto& p : fs.patches) {
    for (std::size_t i = 0; i < p.vertices.size(); ++i) {
      int v = p.vertices[i];
      if (!fs.is_feature_vertex(v)) {
        fs.vertex_patch[v] = p.id;
        fs.vertex_normal[v] = p.normals[i];
      }
    }
  }
  std::vector<Vec3> acc(nv, Vec3::Zero());
  for (const auto& bt : mesh.boundary_tris) {
    Vec3 n = triangle_normal(mesh, bt.v);
    double area = triangle_area(mesh, bt.v);
    for (int v : bt.v) acc[v] += area * n;
  }
  for (int v = 0; v < nv; ++v) {
    if (fs.is_feature_vertex(v)) fs.vertex_normal[v] = acc[v].normalized();
  }
  return fs;
}

FeatureSet build_features(const TetMesh& mesh, const Topology& topo, double angle_threshold_deg) {
  return detect_features(mesh, topo, angle_threshold_deg,
                         mesh.feature_edges.empty() ? FeatureSource::DetectionOnly : FeatureSource::TagsOnly);
}

}  // namespace octaframe
