#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "octaframe/error.hpp"
#include "octaframe/singularity.hpp"

namespace octaframe {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_quarter(double a) {
  // Into [-pi/4, pi/4).
  return a - (kPi / 2) * std::floor(a / (kPi / 2) + 0.5);
}

}  // namespace

std::vector<SurfaceCharge> SurfaceIndices::patch_charges(int patch) const {
  std::vector<SurfaceCharge> out;
  for (const auto& c : charges) {
    if (c.patch == patch) out.push_back(c);
  }
  return out;
}

SurfaceIndices surface_cross_indices(const Domain& domain, const FrameField& field) {
  const TetMesh& mesh = domain.mesh;
  const Topology& topo = domain.topology;
  if (field.coeffs.size() != mesh.num_vertices()) {
    throw Error(ErrorKind::CountMismatch, "field size does not match the mesh");
  }
  const auto& tris = mesh.boundary_tris;
  const std::size_t nb = tris.size();

  // One tangent direction of the restricted cross per triangle.
  std::vector<Vec3> normal(nb), cross(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    const auto& v = tris[i].v;
    normal[i] = triangle_normal(mesh, v);
    const Coeffs avg = field.coeffs[v[0]] + field.coeffs[v[1]] + field.coeffs[v[2]];
    Mat3 R;
    if (avg.norm() > 1e-9) {
      const Mat3* warm = field.frames.size() == mesh.num_vertices() ? &field.frames[v[0]] : nullptr;
      R = project_to_octahedral(avg, warm).frame.R;
    } else {
      R = field.frames.size() == mesh.num_vertices() ? field.frames[v[0]] : Mat3::Identity();
    }
    int drop = 0;
    for (int k = 1; k < 3; ++k) {
      if (std::abs(R.col(k).dot(normal[i])) > std::abs(R.col(drop).dot(normal[i]))) drop = k;
    }
    const Vec3 a = R.col((drop + 1) % 3);
    Vec3 p = a - a.dot(normal[i]) * normal[i];
    if (p.norm() < 1e-12) p = R.col((drop + 2) % 3) - R.col((drop + 2) % 3).dot(normal[i]) * normal[i];
    cross[i] = p.normalized();
  }

  // Cross rotation across each boundary edge, measured against the shared
  // edge direction, from faces[0] to faces[1].
  const auto& bedges = topo.boundary_edges();
  std::vector<double> delta(bedges.size());
  for (std::size_t e = 0; e < bedges.size(); ++e) {
    const auto& be = bedges[e];
    const Vec3 dir = (mesh.vertices[be.v[1]] - mesh.vertices[be.v[0]]).normalized();
    auto alpha = [&](int t) { return std::atan2(dir.cross(cross[t]).dot(normal[t]), dir.dot(cross[t])); };
    const int t0 = topo.boundary_tri_of_face(be.faces[0]);
    const int t1 = topo.boundary_tri_of_face(be.faces[1]);
    delta[e] = wrap_quarter(alpha(t1) - alpha(t0));
  }

  SurfaceIndices out;
  const int nv = static_cast<int>(mesh.num_vertices());
  std::vector<int> quarters(nv, 0);
  for (int v = 0; v < nv; ++v) {
    const auto fan = topo.vertex_boundary_faces(v);
    if (fan.empty()) continue;
    double angle_sum = 0.0, rotation = 0.0;
    int t = topo.boundary_tri_of_face(fan.front());
    const int first = t;
    std::size_t steps = 0;
    do {
      const auto& tv = tris[t].v;
      const int k = static_cast<int>(std::find(tv.begin(), tv.end(), v) - tv.begin());
      const int b = tv[(k + 1) % 3], c = tv[(k + 2) % 3];
      const Vec3 eb = mesh.vertices[b] - mesh.vertices[v];
      const Vec3 ec = mesh.vertices[c] - mesh.vertices[v];
      angle_sum += std::atan2(eb.cross(ec).norm(), eb.dot(ec));
      // Counter-clockwise about the outward normal, the next triangle shares edge (v, c).
      const int e = topo.find_boundary_edge(v, c);
      const auto& be = bedges[e];
      const bool forward = topo.boundary_tri_of_face(be.faces[0]) == t;
      t = topo.boundary_tri_of_face(be.faces[forward ? 1 : 0]);
      rotation += forward ? delta[e] : -delta[e];
      ++steps;
    } while (t != first && steps <= fan.size());
    const double raw = (rotation + 2.0 * kPi - angle_sum) / (kPi / 2);
    const double q = std::round(raw);
    out.max_rounding = std::max(out.max_rounding, std::abs(raw - q));
    quarters[v] = static_cast<int>(q);
    if (quarters[v] != 0) out.charges.push_back(SurfaceCharge{v, domain.features.vertex_patch[v], quarters[v]});
  }

  // Connected components of the boundary surface.
  std::vector<int> comp(nb, -1);
  for (std::size_t seed = 0; seed < nb; ++seed) {
    if (comp[seed] >= 0) continue;
    SurfaceComponent sc;
    const int id = static_cast<int>(out.components.size());
    std::vector<int> stack{static_cast<int>(seed)};
    comp[seed] = id;
    while (!stack.empty()) {
      const int t = stack.back();
      stack.pop_back();
      sc.triangles.push_back(t);
      const auto& tv = tris[t].v;
      for (int k = 0; k < 3; ++k) {
        const auto& be = bedges[topo.find_boundary_edge(tv[k], tv[(k + 1) % 3])];
        for (int f : be.faces) {
          const int u = topo.boundary_tri_of_face(f);
          if (comp[u] < 0) {
            comp[u] = id;
            stack.push_back(u);
          }
        }
      }
    }
    std::sort(sc.triangles.begin(), sc.triangles.end());
    std::vector<int> verts;
    for (int t : sc.triangles) verts.insert(verts.end(), tris[t].v.begin(), tris[t].v.end());
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    const long long F = static_cast<long long>(sc.triangles.size());
    const long long E = 3 * F / 2;
    sc.euler_characteristic = static_cast<int>(static_cast<long long>(verts.size()) - E + F);
    for (int v : verts) sc.total_quarters += quarters[v];
    out.components.push_back(std::move(sc));
  }
  return out;
}

}  // namespace octaframe
