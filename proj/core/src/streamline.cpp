#include "octaframe/streamline.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "octaframe/error.hpp"

namespace octaframe {

namespace {

constexpr double kInsideTol = 1e-10;

bool inside(const Eigen::Vector4d& b) { return b.minCoeff() >= -kInsideTol; }

}  // namespace

int locate_point(const Domain& domain, const Vec3& p, int hint) {
  const TetMesh& mesh = domain.mesh;
  const int nt = static_cast<int>(mesh.num_tets());
  if (nt == 0) return -1;
  const Vec3 lo = domain.bbox_min.array() - 1e-9, hi = domain.bbox_max.array() + 1e-9;
  if ((p.array() < lo.array()).any() || (p.array() > hi.array()).any()) return -1;
  int t = (hint >= 0 && hint < nt) ? hint : 0;
  const int max_steps = std::min(nt, 4096);
  for (int step = 0; step < max_steps; ++step) {
    const Eigen::Vector4d b = barycentric(mesh, t, p);
    if (inside(b)) return t;
    int k = 0;
    b.minCoeff(&k);
    const int next = domain.topology.tet_neighbor(t, k);
    if (next < 0) break;
    t = next;
  }
  // The walk left a non-convex domain or cycled: fall back to a full scan.
  int best = -1;
  double best_min = -kInsideTol;
  for (int s = 0; s < nt; ++s) {
    const double m = barycentric(mesh, s, p).minCoeff();
    if (m >= best_min) {
      best_min = m;
      best = s;
      if (m >= 0.0) break;
    }
  }
  return best;
}

FrameSample interpolate_frame(const Domain& domain, const FrameField& field, const Vec3& p, int hint,
                              const Mat3* warm) {
  const int t = locate_point(domain, p, hint);
  if (t < 0) throw Error(ErrorKind::OutsideMesh, "point outside the mesh");
  const Eigen::Vector4d b = barycentric(domain.mesh, t, p).cwiseMax(0.0);
  const auto& tv = domain.mesh.tets[t];
  FrameSample s;
  s.tet = t;
  for (int k = 0; k < 4; ++k) s.coeffs += (b[k] / b.sum()) * field.coeffs[tv[k]];
  if (s.coeffs.norm() < 1e-12) {
    s.frame = warm != nullptr ? Frame{*warm} : Frame{};
    return s;
  }
  Projection proj = project_to_octahedral(s.coeffs, warm);
  s.frame = proj.frame;
  s.quality = proj.alignment;
  return s;
}

TracerConfig TracerConfig::resolved(const TetMesh& mesh) const {
  TracerConfig c = *this;
  if (c.step <= 0.0) c.step = 0.5 * mesh.mean_edge_length();
  if (c.max_length <= 0.0) c.max_length = 20.0 * mesh.bounding_box_diagonal();
  return c;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::ExitedBoundary: return "ExitedBoundary";
    case Termination::MaxLength: return "MaxLength";
    case Termination::HitSingularRegion: return "HitSingularRegion";
  }
  return "?";
}

namespace {

// First exit of the segment [a, b] through a boundary triangle; a when none.
// Crossings up to 1e-6 of the segment behind a count.
Vec3 clip_to_boundary(const Domain& domain, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  double best = 2.0;
  for (const auto& bt : domain.mesh.boundary_tris) {
    const Vec3& p0 = domain.mesh.vertices[bt.v[0]];
    const Vec3 e1 = domain.mesh.vertices[bt.v[1]] - p0;
    const Vec3 e2 = domain.mesh.vertices[bt.v[2]] - p0;
    const Vec3 pv = d.cross(e2);
    const double det = e1.dot(pv);
    if (det > -1e-300) continue;  // parallel or entering
    const Vec3 tv = a - p0;
    const double u = tv.dot(pv) / det;
    if (u < -1e-12 || u > 1.0 + 1e-12) continue;
    const Vec3 qv = tv.cross(e1);
    const double w = d.dot(qv) / det;
    if (w < -1e-12 || u + w > 1.0 + 1e-12) continue;
    const double t = e2.dot(qv) / det;
    if (t >= -1e-6 && t < best) best = t;
  }
  return best <= 1.0 ? Vec3(a + best * d) : a;
}

}  // namespace

Streamline trace(const Domain& domain, const FrameField& field, const Vec3& p0, const Vec3& v0,
                 const TracerConfig& config) {
  const TracerConfig cfg = config.resolved(domain.mesh);
  if (v0.norm() < 1e-12) throw Error(ErrorKind::InvalidArgument, "zero seed direction");
  const int seed_tet = locate_point(domain, p0);
  if (seed_tet < 0) throw Error(ErrorKind::SeedOutside, "streamline seed lies outside the mesh");

  Streamline s;
  s.seed = p0;
  s.seed_direction = v0.normalized();
  const double h = cfg.step;

  int hint = seed_tet;
  FrameSample f = interpolate_frame(domain, field, p0, hint);
  Mat3 warm = f.frame.R;
  s.min_quality = f.quality;
  Vec3 p = p0;
  Vec3 v = closest_direction(s.seed_direction, f.frame);

  // Frame at q, or nullopt outside the mesh; updates the walk hint and warm start.
  auto sample = [&](const Vec3& q) -> std::optional<FrameSample> {
    const int t = locate_point(domain, q, hint);
    if (t < 0) return std::nullopt;
    hint = t;
    FrameSample fs = interpolate_frame(domain, field, q, t, &warm);
    warm = fs.frame.R;
    s.min_quality = std::min(s.min_quality, fs.quality);
    return fs;
  };

  // One RK4 step of length hh from (p, v); nullopt when a stage leaves the mesh.
  struct Step {
    Vec3 next, dir;
    FrameSample frame;
    bool singular = false;
  };
  auto rk4 = [&](const Vec3& from, const Vec3& v1, double hh) -> std::optional<Step> {
    std::array<Vec3, 4> dirs{v1, Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    const std::array<double, 3> offsets{0.5 * hh, 0.5 * hh, hh};
    Step st;
    for (int k = 0; k < 3; ++k) {
      auto fs = sample(from + offsets[k] * dirs[k]);
      if (!fs) return std::nullopt;
      dirs[k + 1] = closest_direction(dirs[k], fs->frame);
      if (fs->quality < cfg.singular_quality_cutoff || dirs[k + 1].dot(dirs[k]) < cfg.min_direction_dot) {
        st.singular = true;
        return st;
      }
    }
    st.next = from + (hh / 6.0) * (dirs[0] + 2.0 * dirs[1] + 2.0 * dirs[2] + dirs[3]);
    auto fn = sample(st.next);
    if (!fn) return std::nullopt;
    st.dir = dirs[3];
    st.frame = *fn;
    return st;
  };

  while (true) {
    s.points.push_back(p);
    s.directions.push_back(v);
    if (f.quality < cfg.singular_quality_cutoff) {
      s.termination = Termination::HitSingularRegion;
      return s;
    }
    if (s.length >= cfg.max_length - 1e-12 * h) {
      s.termination = Termination::MaxLength;
      return s;
    }
    const double hh = std::min(h, cfg.max_length - s.length);
    const Vec3 v1 = closest_direction(v, f.frame);
    const Mat3 warm_at_p = warm;
    const auto step = rk4(p, v1, hh);
    if (step && step->singular) {
      s.termination = Termination::HitSingularRegion;
      return s;
    }
    if (!step) {
      // Largest fraction of the step that stays inside, then a short clip.
      double lo = 0.0, hi = 1.0;
      Vec3 last = p, last_dir = v1;
      for (int it = 0; it < 48 && (hi - lo) * hh > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        hint = locate_point(domain, p, hint);
        warm = warm_at_p;
        const auto part = rk4(p, v1, mid * hh);
        if (part && !part->singular) {
          lo = mid;
          last = part->next;
          last_dir = part->dir;
        } else {
          hi = mid;
        }
      }
      const Vec3 exit = clip_to_boundary(domain, last, last + h * last_dir);
      s.points.push_back(exit);
      s.directions.push_back(last_dir);
      s.length += (last - p).norm() + (exit - last).dot(last_dir);
      s.termination = Termination::ExitedBoundary;
      return s;
    }
    s.length += (step->next - p).norm();
    if (step->dir.dot(v) < cfg.min_direction_dot) {
      s.termination = Termination::HitSingularRegion;
      return s;
    }
    p = step->next;
    v = step->dir;
    f = step->frame;
  }
}

}  // namespace octaframe
