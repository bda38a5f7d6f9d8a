#include "octaframe/singularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "octaframe/error.hpp"

namespace octaframe {

MatchingFrames matching_frames(const Domain& domain, const FrameField& field, double hot_spot_quality) {
  const std::size_t nv = field.coeffs.size();
  if (nv != domain.mesh.num_vertices()) throw Error(ErrorKind::CountMismatch, "field size does not match the mesh");
  FrameField local;
  const FrameField* f = &field;
  if (field.frames.size() != nv || field.quality.size() != nv) {
    local.coeffs = field.coeffs;
    update_projection(local);
    f = &local;
  }
  MatchingFrames out;
  out.frames = f->frames;
  out.valid.assign(nv, 1);
  for (std::size_t v = 0; v < nv; ++v) {
    if (f->quality[v] >= hot_spot_quality) continue;
    const int vi = static_cast<int>(v);
    out.hot_spots.push_back(vi);
    Coeffs good = Coeffs::Zero(), all = Coeffs::Zero();
    int n_good = 0;
    for (int w : domain.topology.vertex_neighbors(vi)) {
      all += f->coeffs[w];
      if (f->quality[w] >= hot_spot_quality) {
        good += f->coeffs[w];
        ++n_good;
      }
    }
    const Coeffs avg = n_good > 0 ? good : all;
    if (avg.norm() < 1e-9) {
      if (f->coeffs[v].norm() < 1e-9) {
        out.valid[v] = 0;
        out.unprojectable.push_back(vi);
      }
      continue;
    }
    out.frames[v] = project_to_octahedral(avg, &out.frames[v]).frame.R;
  }
  return out;
}

int SingularFace::valence() const {
  if (index_quarters == 1) return 3;
  if (index_quarters == -1) return 5;
  return kOtherValence;
}

namespace {

// Matching computed on the ordered pair (low, high) and inverted for the
// reverse direction: g(b, a) = g(a, b)^-1 exactly.
int edge_matching(const MatchingFrames& frames, int a, int b) {
  if (a < b) return octa_matching(Frame{frames.frames[a]}, Frame{frames.frames[b]});
  return group_inverse(octa_matching(Frame{frames.frames[b]}, Frame{frames.frames[a]}));
}

}  // namespace

std::optional<SingularFace> face_singularity(const Domain& domain, const MatchingFrames& frames, int face) {
  const Face& f = domain.topology.face(face);
  const auto& v = f.v;
  for (int k = 0; k < 3; ++k) {
    if (!frames.valid[v[k]]) return std::nullopt;
  }
  const int h = group_multiply(group_multiply(edge_matching(frames, v[0], v[1]), edge_matching(frames, v[1], v[2])),
                               edge_matching(frames, v[2], v[0]));
  if (h == 0) return std::nullopt;

  SingularFace sf;
  sf.face = face;
  sf.triangle = v;
  sf.tets = f.tet;
  sf.group_rotation = h;
  // Carrying the frame of v0 around the loop returns R0 * H^-1 = Q * R0, with
  // Q the world rotation about R0 * u.
  const Mat3& H = octahedral_group()[group_inverse(h)];
  const double angle = rotation_angle(H);
  if (std::abs(angle - std::numbers::pi / 2) < 1e-6) {
    const Vec3 u = Vec3(H(2, 1) - H(1, 2), H(0, 2) - H(2, 0), H(1, 0) - H(0, 1)) / (2.0 * std::sin(angle));
    sf.axis = frames.frames[v[0]] * u;
    const Vec3 n = (domain.mesh.vertices[v[1]] - domain.mesh.vertices[v[0]])
                       .cross(domain.mesh.vertices[v[2]] - domain.mesh.vertices[v[0]]);
    sf.index_quarters = sf.axis.dot(n) >= 0.0 ? 1 : -1;
  }
  return sf;
}

std::vector<Vec3> SingularChain::polyline(const TetMesh& mesh, const std::vector<SingularFace>& all) const {
  std::vector<Vec3> pts;
  auto push = [&pts](const Vec3& p) {
    if (pts.empty() || (pts.back() - p).norm() > 1e-15) pts.push_back(p);
  };
  if (start.kind != ChainEndpoint::Kind::Closed) push(start.position);
  for (int fi : faces) push(triangle_centroid(mesh, all[fi].triangle));
  if (end.kind == ChainEndpoint::Kind::Closed) {
    if (!faces.empty()) pts.push_back(triangle_centroid(mesh, all[faces.front()].triangle));
  } else {
    push(end.position);
  }
  return pts;
}

std::size_t SingularityGraph::num_35() const {
  return static_cast<std::size_t>(std::count_if(chains.begin(), chains.end(), [](const auto& c) { return c.is_35; }));
}

SingularityGraph extract_graph(const Domain& domain, const FrameField& field) {
  const Topology& topo = domain.topology;
  const TetMesh& mesh = domain.mesh;
  const MatchingFrames frames = matching_frames(domain, field);

  SingularityGraph g;
  g.hot_spots = frames.hot_spots;
  g.unprojectable = frames.unprojectable;
  const int nf = static_cast<int>(topo.faces().size());
  std::vector<int> face_sing(nf, -1);
  for (int f = 0; f < nf; ++f) {
    if (auto sf = face_singularity(domain, frames, f)) {
      face_sing[f] = static_cast<int>(g.faces.size());
      g.faces.push_back(*sf);
    }
  }

  const int nt = static_cast<int>(mesh.num_tets());
  std::vector<std::array<int, 4>> tet_sing(nt);
  std::vector<int> degree(nt, 0);
  for (int t = 0; t < nt; ++t) {
    for (int k = 0; k < 4; ++k) {
      const int f = topo.tet_face(t, k);
      if (face_sing[f] >= 0) tet_sing[t][degree[t]++] = f;
    }
  }
  std::vector<int> junction_of(nt, -1);
  for (int t = 0; t < nt; ++t) {
    if (degree[t] == 1) g.defect_tets.push_back(t);
    if (degree[t] >= 3) {
      junction_of[t] = static_cast<int>(g.junctions.size());
      g.junctions.push_back(JunctionNode{static_cast<int>(g.junctions.size()), t, mesh.tet_centroid(t), {}});
    }
  }

  std::vector<char> used(nf, 0);
  auto other_tet = [&](int f, int t) { return topo.face(f).tet[0] == t ? topo.face(f).tet[1] : topo.face(f).tet[0]; };
  auto tet_endpoint = [&](int t) {
    ChainEndpoint e;
    if (junction_of[t] >= 0) {
      e.kind = ChainEndpoint::Kind::Junction;
      e.node = junction_of[t];
    } else {
      e.kind = ChainEndpoint::Kind::Defect;
    }
    e.position = mesh.tet_centroid(t);
    return e;
  };
  auto boundary_endpoint = [&](int f) {
    ChainEndpoint e;
    e.kind = ChainEndpoint::Kind::BoundaryNode;
    e.node = f;  // replaced by the node id once chains are oriented
    e.position = triangle_centroid(mesh, topo.face(f).v);
    return e;
  };

  // Walks from `prev` (a tet, or -1 outside the mesh) through face f.
  auto walk = [&](int prev, int f, SingularChain& chain) {
    while (true) {
      used[f] = 1;
      chain.faces.push_back(face_sing[f]);
      const int next = other_tet(f, prev);
      if (next < 0) {
        chain.end = boundary_endpoint(f);
        return;
      }
      chain.tets.push_back(next);
      if (degree[next] != 2) {
        chain.end = tet_endpoint(next);
        return;
      }
      const int nf2 = tet_sing[next][0] == f ? tet_sing[next][1] : tet_sing[next][0];
      if (used[nf2]) {
        chain.end.kind = ChainEndpoint::Kind::Closed;
        return;
      }
      prev = next;
      f = nf2;
    }
  };

  std::vector<SingularChain> chains;
  for (int f : topo.boundary_faces()) {
    if (face_sing[f] < 0 || used[f]) continue;
    SingularChain c;
    c.start = boundary_endpoint(f);
    walk(-1, f, c);
    chains.push_back(std::move(c));
  }
  for (int t = 0; t < nt; ++t) {
    if (degree[t] == 2 || degree[t] == 0) continue;
    for (int k = 0; k < degree[t]; ++k) {
      const int f = tet_sing[t][k];
      if (used[f]) continue;
      SingularChain c;
      c.start = tet_endpoint(t);
      c.tets.push_back(t);
      walk(t, f, c);
      chains.push_back(std::move(c));
    }
  }
  for (int f = 0; f < nf; ++f) {
    if (face_sing[f] < 0 || used[f]) continue;
    SingularChain c;
    c.start.kind = ChainEndpoint::Kind::Closed;
    walk(topo.face(f).tet[0], f, c);
    c.end.kind = ChainEndpoint::Kind::Closed;
    chains.push_back(std::move(c));
  }

  for (auto& c : chains) {
    if (c.start.kind != ChainEndpoint::Kind::Closed && c.faces.back() < c.faces.front()) {
      std::reverse(c.faces.begin(), c.faces.end());
      std::reverse(c.tets.begin(), c.tets.end());
      std::swap(c.start, c.end);
    }
  }
  std::stable_sort(chains.begin(), chains.end(),
                   [](const SingularChain& a, const SingularChain& b) { return a.faces.front() < b.faces.front(); });
  for (std::size_t i = 0; i < chains.size(); ++i) {
    auto& c = chains[i];
    c.id = static_cast<int>(i);
    c.valence_start = g.faces[c.faces.front()].valence();
    c.valence_end = g.faces[c.faces.back()].valence();
    c.is_35 = c.valence_start != c.valence_end && std::min(c.valence_start, c.valence_end) == 3 &&
              std::max(c.valence_start, c.valence_end) == 5;
    for (ChainEndpoint* e : {&c.start, &c.end}) {
      if (e->kind == ChainEndpoint::Kind::BoundaryNode) {
        const int face = e->node;
        e->node = static_cast<int>(g.boundary_nodes.size());
        g.boundary_nodes.push_back(BoundaryNode{e->node, face, e->position, c.id});
      } else if (e->kind == ChainEndpoint::Kind::Junction) {
        g.junctions[e->node].chains.push_back(c.id);
      }
    }
  }
  g.chains = std::move(chains);
  return g;
}

std::vector<SingularChain> detect_35(const SingularityGraph& graph) {
  std::vector<SingularChain> out;
  for (const auto& c : graph.chains) {
    if (c.is_35) out.push_back(c);
  }
  return out;
}

Vec3 stable_direction(const Domain& domain, const SingularityGraph& graph, const SingularChain& chain, ChainEnd end) {
  if (chain.faces.empty()) throw Error(ErrorKind::InvalidArgument, "chain without faces");
  const bool at_start = end == ChainEnd::Start;
  const SingularFace& sf = graph.faces[at_start ? chain.faces.front() : chain.faces.back()];
  if (!sf.is_quarter_turn()) {
    throw Error(ErrorKind::AmbiguousAxis, "chain " + std::to_string(chain.id) + " end holonomy is not a quarter turn");
  }
  Vec3 axis = sf.axis.normalized();
  const ChainEndpoint& ep = at_start ? chain.start : chain.end;
  Vec3 inward;
  if (ep.kind == ChainEndpoint::Kind::BoundaryNode) {
    const int face = graph.boundary_nodes[ep.node].face;
    inward = -triangle_normal(domain.mesh, domain.topology.face(face).v);
  } else {
    const auto pts = chain.polyline(domain.mesh, graph.faces);
    inward = at_start ? Vec3(pts[std::min<std::size_t>(1, pts.size() - 1)] - pts.front())
                      : Vec3(pts[pts.size() >= 2 ? pts.size() - 2 : 0] - pts.back());
  }
  if (axis.dot(inward) < 0.0) axis = -axis;
  return axis;
}

}  // namespace octaframe
