#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <queue>
#include <set>
#include <string>

#include "octaframe/correction.hpp"
#include "octaframe/error.hpp"

namespace octaframe {

namespace {

using Adjacency = std::vector<std::vector<std::pair<int, double>>>;

Adjacency boundary_graph(const Domain& domain) {
  Adjacency adj(domain.mesh.num_vertices());
  for (const BoundaryEdge& e : domain.topology.boundary_edges()) {
    const double w = (domain.mesh.vertices[e.v[0]] - domain.mesh.vertices[e.v[1]]).norm();
    adj[e.v[0]].emplace_back(e.v[1], w);
    adj[e.v[1]].emplace_back(e.v[0], w);
  }
  for (auto& list : adj) std::sort(list.begin(), list.end());
  return adj;
}

// Multi-source Dijkstra; stops expanding beyond `limit`. Ties break on the vertex id.
std::vector<double> dijkstra(const Adjacency& adj, const std::vector<int>& sources, std::vector<int>* parent,
                             double limit = std::numeric_limits<double>::infinity(), int target = -1) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(adj.size(), inf);
  if (parent != nullptr) parent->assign(adj.size(), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (int s : sources) {
    dist[s] = 0.0;
    pq.emplace(0.0, s);
  }
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    if (v == target) break;
    for (const auto& [w, len] : adj[v]) {
      const double nd = d + len;
      if (nd > limit || nd >= dist[w]) continue;
      dist[w] = nd;
      if (parent != nullptr) (*parent)[w] = v;
      pq.emplace(nd, w);
    }
  }
  return dist;
}

int nearest_of(const TetMesh& mesh, const std::vector<int>& candidates, const Vec3& p) {
  int best = -1;
  double best_d = 0.0;
  for (int v : candidates) {
    const double d = (mesh.vertices[v] - p).squaredNorm();
    if (best < 0 || d < best_d) {
      best = v;
      best_d = d;
    }
  }
  return best;
}

Vec3 path_tangent(const TetMesh& mesh, const std::vector<int>& path, std::size_t i) {
  const std::size_t a = i > 1 ? i - 2 : 0;
  const std::size_t b = std::min(i + 2, path.size() - 1);
  return mesh.vertices[path[b]] - mesh.vertices[path[a]];
}

// Feature vertices take the normal of the surface the path leaves into.
Vec3 path_normal(const FeatureSet& fs, const std::vector<int>& path, std::size_t i) {
  const int v = path[i];
  if (!fs.is_feature_vertex(v)) return fs.vertex_normal[v];
  for (std::size_t j : {i + 1, i - 1}) {
    if (j < path.size() && !fs.is_feature_vertex(path[j])) return fs.vertex_normal[path[j]];
  }
  return fs.vertex_normal[v];
}

}  // namespace

Mat3 snapped_frame(const Vec3& tangent, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  Vec3 t = tangent - tangent.dot(n) * n;
  if (t.norm() < 1e-12) throw Error(ErrorKind::DegenerateTangent, "path tangent parallel to the surface normal");
  t.normalize();
  const Vec3 b = t.cross(n);
  Mat3 R;
  R.col(0) = t;
  R.col(1) = (n - b) / std::numbers::sqrt2;
  R.col(2) = (n + b) / std::numbers::sqrt2;
  return R;
}

CorrectionPlan snap_35_curves(const Domain& domain, const FrameField& field, const SingularityGraph& graph,
                              const SnapOptions& options) {
  CorrectionPlan plan;
  plan.strategy = Strategy::Snap;
  const TetMesh& mesh = domain.mesh;
  const FeatureSet& fs = domain.features;
  const int nv = static_cast<int>(mesh.num_vertices());

  std::vector<int> feature_vertices, boundary_vertices;
  for (int v = 0; v < nv; ++v) {
    if (!domain.topology.is_boundary_vertex(v)) continue;
    boundary_vertices.push_back(v);
    if (fs.is_feature_vertex(v)) feature_vertices.push_back(v);
  }

  const std::size_t nc = graph.chains.size();
  std::vector<char> assigned(nc, 0);
  std::map<int, SnapTarget> junction_target;
  auto target_for = [&](const ChainEndpoint& ep) {
    if (ep.kind == ChainEndpoint::Kind::BoundaryNode) {
      if (feature_vertices.empty()) return SnapTarget{nearest_of(mesh, boundary_vertices, ep.position), false};
      return SnapTarget{nearest_of(mesh, feature_vertices, ep.position), true};
    }
    if (ep.kind == ChainEndpoint::Kind::Junction) {
      auto it = junction_target.find(ep.node);
      if (it != junction_target.end()) return it->second;
    }
    const int v = nearest_of(mesh, boundary_vertices, ep.position);
    SnapTarget t{v, fs.is_feature_vertex(v)};
    if (ep.kind == ChainEndpoint::Kind::Junction) junction_target.emplace(ep.node, t);
    return t;
  };
  auto touches_snapped_junction = [&](const SingularChain& c) {
    for (const ChainEndpoint* ep : {&c.start, &c.end}) {
      if (ep->kind == ChainEndpoint::Kind::Junction && junction_target.contains(ep->node)) return true;
    }
    return false;
  };

  std::vector<SnapAssignment> snaps;
  bool changed = true;
  while (changed && plan.snap_iterations < static_cast<int>(nc)) {
    changed = false;
    ++plan.snap_iterations;
    for (std::size_t i = 0; i < nc; ++i) {
      const SingularChain& c = graph.chains[i];
      if (assigned[i] || c.start.kind == ChainEndpoint::Kind::Closed) continue;
      if (!c.is_35 && !touches_snapped_junction(c)) continue;
      assigned[i] = 1;
      changed = true;
      SnapAssignment s;
      s.chain = c.id;
      s.targets = {target_for(c.start), target_for(c.end)};
      snaps.push_back(std::move(s));
    }
  }
  for (const SingularChain& c : graph.chains) {
    if (c.is_35 && c.start.kind == ChainEndpoint::Kind::Closed) {
      plan.fail("chain " + std::to_string(c.id) + " is closed and cannot be snapped");
    }
  }

  const Adjacency adj = boundary_graph(domain);
  for (SnapAssignment& s : snaps) {
    const int a = s.targets[0].vertex, b = s.targets[1].vertex;
    std::vector<int> parent;
    const auto dist = dijkstra(adj, {a}, &parent, std::numeric_limits<double>::infinity(), b);
    if (!std::isfinite(dist[b])) {
      throw Error(ErrorKind::NoBoundaryPath, "chain " + std::to_string(s.chain) + ": vertices " + std::to_string(a) +
                                                 " and " + std::to_string(b) + " lie on disconnected boundaries");
    }
    for (int v = b; v >= 0; v = parent[v]) {
      s.path.push_back(v);
      if (v == a) break;
    }
    std::reverse(s.path.begin(), s.path.end());
    plan.diagnostics.push_back("chain " + std::to_string(s.chain) + " snapped to vertices " + std::to_string(a) +
                               (s.targets[0].on_feature ? " (feature)" : " (surface)") + " and " + std::to_string(b) +
                               (s.targets[1].on_feature ? " (feature)" : " (surface)") + ", path of " +
                               std::to_string(s.path.size()) + " vertices");
  }
  plan.snaps = std::move(snaps);
  const double radius = options.free_radius > 0.0 ? options.free_radius : 3.0 * mesh.mean_edge_length();
  plan.boundary_conditions = build_snapped_bcs(domain, field.bcs, plan.snaps, radius);
  return plan;
}

BoundaryConditionSet build_snapped_bcs(const Domain& domain, const BoundaryConditionSet& bcs,
                                       const std::vector<SnapAssignment>& snaps, double free_radius) {
  BoundaryConditionSet out = bcs;
  const TetMesh& mesh = domain.mesh;
  const FeatureSet& fs = domain.features;

  // Surface points where several snapped curves meet have no single tangent; they stay free.
  std::map<int, int> meetings;
  for (const SnapAssignment& s : snaps) {
    if (s.path.size() < 2) continue;
    for (int k = 0; k < 2; ++k) {
      if (!s.targets[k].on_feature) ++meetings[s.targets[k].vertex];
    }
  }
  std::map<int, Coeffs> snapped;
  std::vector<int> path_vertices;
  for (const SnapAssignment& s : snaps) {
    if (s.path.size() < 2) continue;
    for (std::size_t i = 0; i < s.path.size(); ++i) {
      const int v = s.path[i];
      path_vertices.push_back(v);
      if (snapped.contains(v)) continue;
      if (auto it = meetings.find(v); it != meetings.end() && it->second > 1) continue;
      snapped.emplace(v, rotate_reference(snapped_frame(path_tangent(mesh, s.path, i), path_normal(fs, s.path, i))));
    }
  }
  if (snapped.empty()) return out;
  for (const auto& [v, c] : snapped) {
    out.dirichlet[v] = c;
    out.tangency.erase(v);
    out.free_boundary.erase(v);
  }

  for (const FeatureCurve& curve : fs.curves) {
    const int n = static_cast<int>(curve.size());
    std::vector<int> splits;
    for (int k = 0; k < n; ++k) {
      if (snapped.contains(curve.vertices[k])) splits.push_back(k);
    }
    if (splits.empty()) continue;
    std::vector<double> arc(n + 1, 0.0);
    for (int k = 0; k < n; ++k) {
      arc[k + 1] = arc[k] + (mesh.vertices[curve.vertices[(k + 1) % n]] - mesh.vertices[curve.vertices[k]]).norm();
    }
    if (curve.closed) {
      if (splits.size() == 1) {
        // A single cut leaves one loop; the farthest vertex keeps its value.
        const int s = splits.front();
        int far = s;
        double best = -1.0;
        for (int k = 0; k < n; ++k) {
          const double d = std::abs(arc[k] - arc[s]);
          const double along = std::min(d, arc[n] - d);
          if (along > best) {
            best = along;
            far = k;
          }
        }
        splits.push_back(far);
        std::sort(splits.begin(), splits.end());
      }
      splits.push_back(splits.front() + n);
    } else {
      if (splits.front() != 0) splits.insert(splits.begin(), 0);
      if (splits.back() != n - 1) splits.push_back(n - 1);
    }
    auto value = [&](int k) {
      const int v = curve.vertices[k % n];
      auto it = snapped.find(v);
      if (it != snapped.end()) return it->second;
      auto d = bcs.dirichlet.find(v);
      return d != bcs.dirichlet.end() ? d->second : reference_coeffs();
    };
    auto arc_at = [&](int k) { return k >= n ? arc[n] + arc[k - n] : arc[k]; };
    for (std::size_t j = 0; j + 1 < splits.size(); ++j) {
      const int a = splits[j], b = splits[j + 1];
      const Coeffs qa = value(a), qb = value(b);
      const double len = arc_at(b) - arc_at(a);
      for (int k = a + 1; k < b; ++k) {
        const int v = curve.vertices[k % n];
        if (fs.is_corner[v] || snapped.contains(v)) continue;
        const double u = len > 0.0 ? (arc_at(k) - arc_at(a)) / len : 0.0;
        out.dirichlet[v] = project_to_octahedral((1.0 - u) * qa + u * qb).coeffs;
      }
    }
  }

  std::sort(path_vertices.begin(), path_vertices.end());
  path_vertices.erase(std::unique(path_vertices.begin(), path_vertices.end()), path_vertices.end());
  const auto dist = dijkstra(boundary_graph(domain), path_vertices, nullptr, free_radius);
  for (std::size_t v = 0; v < dist.size(); ++v) {
    const int vi = static_cast<int>(v);
    if (dist[v] <= free_radius && out.tangency.erase(vi) > 0) out.free_boundary.insert(vi);
  }
  return out;
}

}  // namespace octaframe
