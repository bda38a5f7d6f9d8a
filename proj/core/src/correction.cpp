#include "octaframe/correction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include "octaframe/error.hpp"

namespace octaframe {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string vec_str(const Vec3& v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.4g, %.4g, %.4g)", v.x(), v.y(), v.z());
  return buf;
}

// Rejects failed traces; returns false when the plan was marked.
bool accept_trace(CorrectionPlan& plan, const Streamline& s, const std::string& what) {
  switch (s.termination) {
    case Termination::ExitedBoundary:
      return true;
    case Termination::MaxLength:
      plan.fail(what + ": limit cycle, streamline reached the length bound " + fmt("%.4g", s.length));
      return false;
    case Termination::HitSingularRegion:
      plan.fail(what + ": streamline hit a singular region at " + vec_str(s.points.back()));
      return false;
  }
  return false;
}

double segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double u = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + u * ab)).norm();
}

// Cuts the streamline at its first point within `clearance` of a chain other than `own`.
void stop_at_other_chains(Streamline& s, const TetMesh& mesh, const SingularityGraph& graph, int own,
                          double clearance) {
  std::vector<std::vector<Vec3>> others;
  for (const SingularChain& c : graph.chains) {
    if (c.id != own) others.push_back(c.polyline(mesh, graph.faces));
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (const auto& pl : others) {
      for (std::size_t k = 0; k < pl.size(); ++k) {
        const Vec3& b = pl[std::min(k + 1, pl.size() - 1)];
        if (segment_distance(s.points[i], pl[k], b) > clearance) continue;
        s.points.resize(i + 1);
        s.directions.resize(i + 1);
        s.termination = Termination::HitSingularRegion;
        return;
      }
    }
  }
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::ExtrudeCurves: return "extrude-curve";
    case Strategy::ExtrudeNodes: return "extrude-node";
    case Strategy::Snap: return "snap";
  }
  return "unknown";
}

void CorrectionPlan::fail(std::string message) {
  applicable = false;
  failures.push_back(message);
  diagnostics.push_back(std::move(message));
}

std::vector<Vec3> extrusion_directions(const FeatureCurve& curve, int sample, const Frame& frame, double margin_deg) {
  if (curve.target_valence < 2) {
    throw Error(ErrorKind::InvalidArgument, "curve " + std::to_string(curve.id) + " has valence 1, no propagation");
  }
  if (sample < 0 || sample >= static_cast<int>(curve.size())) {
    throw Error(ErrorKind::IndexOutOfRange, "curve sample out of range");
  }
  const Vec3& t = curve.tangents[sample];
  const Vec3& r0 = curve.rays[sample][0];
  const double wedge = wedge_angle(t, r0, curve.rays[sample][1]);
  const double margin = margin_deg * kDegToRad;

  int along = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(frame.axis(i).dot(t)) > std::abs(frame.axis(along).dot(t))) along = i;
  }
  std::vector<Vec3> out;
  for (int i = 0; i < 3; ++i) {
    if (i == along) continue;
    for (double sign : {1.0, -1.0}) {
      const Vec3 a = sign * frame.axis(i);
      const Vec3 p = a - a.dot(t) * t;
      if (p.norm() < 1e-12) continue;
      const double phi = wedge_angle(t, r0, p.normalized());
      if (phi > margin && phi < wedge - margin) out.push_back(a);
    }
  }
  if (static_cast<int>(out.size()) != curve.target_valence - 1) {
    throw Error(ErrorKind::WedgeMismatch, "curve " + std::to_string(curve.id) + " vertex " +
                                              std::to_string(curve.vertices[sample]) + ": " +
                                              std::to_string(out.size()) + " frame axes inside the " +
                                              fmt("%.1f", wedge / kDegToRad) + " deg wedge, expected " +
                                              std::to_string(curve.target_valence - 1));
  }
  return out;
}

int nearest_vertex(const Domain& domain, const Vec3& p, int hint) {
  const int t = locate_point(domain, p, hint);
  if (t < 0) return -1;
  int best = -1;
  double best_d = 0.0;
  auto consider = [&](int v) {
    const double d = (domain.mesh.vertices[v] - p).squaredNorm();
    if (best < 0 || d < best_d || (d == best_d && v < best)) {
      best = v;
      best_d = d;
    }
  };
  for (int v : domain.mesh.tets[t]) {
    consider(v);
    for (int w : domain.topology.vertex_neighbors(v)) consider(w);
  }
  return best;
}

CorrectionPlan extrude_feature_curves(const Domain& domain, const FrameField& field, const ExtrusionOptions& options) {
  CorrectionPlan plan;
  plan.strategy = Strategy::ExtrudeCurves;
  const FeatureSet& fs = domain.features;
  const TracerConfig tracer = options.tracer.resolved(domain.mesh);
  const double merge_cos = std::cos(options.merge_angle_deg * kDegToRad);

  std::map<int, Vec3> normals;
  std::map<int, std::string> origin;
  std::set<int> sheared;
  for (const FeatureCurve& curve : fs.curves) {
    if (curve.target_valence < 2) {
      plan.diagnostics.push_back("curve " + std::to_string(curve.id) + ": valence 1, no propagation");
      continue;
    }
    for (int k = 0; k < static_cast<int>(curve.size()); ++k) {
      const int v = curve.vertices[k];
      if (fs.is_corner[v]) continue;
      const std::string where = "curve " + std::to_string(curve.id) + " vertex " + std::to_string(v);
      std::vector<Vec3> dirs;
      try {
        dirs = extrusion_directions(curve, k, field.frame(v), options.wedge_margin_deg);
      } catch (const Error& e) {
        plan.fail(e.what());
        continue;
      }
      const Vec3& te = curve.tangents[k];
      for (const Vec3& d : dirs) {
        TracedLine tl{curve.id, k, trace(domain, field, domain.mesh.vertices[v], d, tracer)};
        const bool ok = accept_trace(plan, tl.line, where);
        if (ok) {
          int hint = 0;
          for (std::size_t i = 1; i < tl.line.size(); ++i) {
            const int w = nearest_vertex(domain, tl.line.points[i], hint);
            if (w < 0 || domain.topology.is_boundary_vertex(w)) continue;
            hint = domain.topology.vertex_tets(w)[0];
            const Vec3 n = te.cross(tl.line.directions[i]);
            if (n.norm() < 1e-9) continue;
            const Vec3 nn = n.normalized();
            auto [it, inserted] = normals.emplace(w, nn);
            if (inserted) {
              origin.emplace(w, where);
            } else if (std::abs(it->second.dot(nn)) < merge_cos && sheared.insert(w).second) {
              const double angle = std::acos(std::min(1.0, std::abs(it->second.dot(nn)))) / kDegToRad;
              plan.fail("sheared sheet: vertex " + std::to_string(w) + " receives directions " +
                        fmt("%.1f", angle) + " deg apart (" + origin[w] + " and " + where + ")");
            }
          }
        }
        plan.streamlines.push_back(std::move(tl));
      }
    }
  }
  for (const auto& [v, n] : normals) {
    plan.constraints.push_back(InternalConstraint{v, InternalConstraint::Kind::TangencyDir, n, Coeffs::Zero()});
  }
  return plan;
}

CorrectionPlan extrude_singular_nodes(const Domain& domain, const FrameField& field, const SingularityGraph& graph,
                                      const ExtrusionOptions& options) {
  CorrectionPlan plan;
  plan.strategy = Strategy::ExtrudeNodes;
  const TracerConfig tracer = options.tracer.resolved(domain.mesh);
  const double merge_cos = std::cos(options.merge_angle_deg * kDegToRad);
  const double clearance = options.singular_clearance * domain.mesh.mean_edge_length();

  std::map<int, Vec3> axes;
  std::set<int> conflicted;
  for (const SingularChain& chain : graph.chains) {
    if (!chain.is_35) continue;
    const auto pts = chain.polyline(domain.mesh, graph.faces);
    for (ChainEnd end : {ChainEnd::Start, ChainEnd::End}) {
      const bool at_start = end == ChainEnd::Start;
      const ChainEndpoint& ep = at_start ? chain.start : chain.end;
      const std::string where = "chain " + std::to_string(chain.id) + (at_start ? " start" : " end");
      Vec3 dir;
      if (ep.kind == ChainEndpoint::Kind::BoundaryNode) {
        try {
          dir = stable_direction(domain, graph, chain, end);
        } catch (const Error& e) {
          plan.fail(where + ": " + e.what());
          continue;
        }
      } else if (ep.kind == ChainEndpoint::Kind::Closed || pts.size() < 2) {
        continue;
      } else {
        const Vec3 cont = at_start ? Vec3(pts[0] - pts[1]) : Vec3(pts.back() - pts[pts.size() - 2]);
        try {
          const FrameSample s = interpolate_frame(domain, field, ep.position);
          dir = closest_direction(cont.normalized(), s.frame);
        } catch (const Error& e) {
          plan.fail(where + ": " + e.what());
          continue;
        }
      }
      TracedLine tl{chain.id, at_start ? 0 : 1, trace(domain, field, ep.position, dir, tracer)};
      stop_at_other_chains(tl.line, domain.mesh, graph, chain.id, clearance);
      if (accept_trace(plan, tl.line, where)) {
        int hint = 0;
        for (std::size_t i = 0; i < tl.line.size(); ++i) {
          const int w = nearest_vertex(domain, tl.line.points[i], hint);
          if (w < 0 || domain.topology.is_boundary_vertex(w)) continue;
          hint = domain.topology.vertex_tets(w)[0];
          const Vec3& d = tl.line.directions[i];
          auto [it, inserted] = axes.emplace(w, d);
          if (!inserted && std::abs(it->second.dot(d)) < merge_cos && conflicted.insert(w).second) {
            plan.fail(where + ": vertex " + std::to_string(w) + " receives two axes " +
                      fmt("%.1f", std::acos(std::min(1.0, std::abs(it->second.dot(d)))) / kDegToRad) + " deg apart");
          }
        }
      }
      plan.streamlines.push_back(std::move(tl));
    }
  }
  for (const auto& [v, a] : axes) {
    plan.constraints.push_back(
        InternalConstraint{v, InternalConstraint::Kind::DirichletCoeffs, a, axisymmetric_coeffs(a)});
  }
  return plan;
}

CorrectionResult apply_plan(const Domain& domain, const FrameField& field, const CorrectionPlan& plan,
                            const SolverConfig& config) {
  if (!plan.applicable) {
    std::string msg = std::string(to_string(plan.strategy)) + " plan is not applicable";
    if (!plan.failures.empty()) msg += ": " + plan.failures.front();
    throw Error(ErrorKind::NonApplicable, msg);
  }
  BoundaryConditionSet bcs = plan.boundary_conditions ? *plan.boundary_conditions : field.bcs;
  add_internal_constraints(domain, bcs, plan.constraints);
  CorrectionResult r;
  r.field = compute_field(domain, bcs, config, &r.smoothing);
  r.graph = extract_graph(domain, r.field);
  return r;
}

}  // namespace octaframe
