#pragma once

#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "octaframe/frame.hpp"
#include "octaframe/generate.hpp"
#include "octaframe/solver.hpp"

namespace testing {

using octaframe::Coeffs;
using octaframe::Mat3;
using octaframe::Vec3;

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(OCTAFRAME_FIXTURE_DIR) / name;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("octaframe_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Hand-rolled generators over a seeded engine.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a = 0.0, double b = 1.0) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  double normal() { return std::normal_distribution<double>()(rng_); }

  Vec3 unit() {
    Vec3 v(normal(), normal(), normal());
    while (v.norm() < 1e-6) v = Vec3(normal(), normal(), normal());
    return v.normalized();
  }

  /// Haar-uniform rotation from a normalized Gaussian quaternion.
  Mat3 rotation() {
    Eigen::Quaterniond q(normal(), normal(), normal(), normal());
    q.normalize();
    return q.toRotationMatrix();
  }

  Coeffs coeffs() {
    Coeffs c;
    for (int i = 0; i < 9; ++i) c[i] = normal();
    return c;
  }

  /// Rotation at most `angle` radians away from identity.
  Mat3 small_rotation(double angle) {
    return Eigen::AngleAxisd(uniform(-angle, angle), unit()).toRotationMatrix();
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Mat3 rot_z(double a) { return Eigen::AngleAxisd(a, Vec3::UnitZ()).toRotationMatrix(); }

inline octaframe::Domain box_domain(int nx, int ny, int nz, const Vec3& extent = Vec3::Ones()) {
  octaframe::BoxOptions o;
  o.extent = extent;
  return octaframe::Domain::build(octaframe::generate_box(nx, ny, nz, o));
}

/// Exact field R(p) at every vertex.
inline octaframe::FrameField field_from(const octaframe::Domain& domain, const std::function<Mat3(const Vec3&)>& R) {
  octaframe::FrameField f;
  for (const Vec3& p : domain.mesh.vertices) {
    const Mat3 r = R(p);
    f.coeffs.push_back(octaframe::coeffs_from_rotation(r));
    f.frames.push_back(r);
    f.quality.push_back(1.0);
  }
  return f;
}

/// Coefficients blending linearly in x from the identity frame at x = 0 to
/// Rz(theta) at x = 2; the projected field is smooth.
inline octaframe::FrameField twist_field(const octaframe::Domain& domain, double theta) {
  const octaframe::Coeffs q0 = octaframe::coeffs_from_rotation(Mat3::Identity());
  const octaframe::Coeffs q1 = octaframe::coeffs_from_rotation(rot_z(theta));
  octaframe::FrameField f;
  for (const Vec3& p : domain.mesh.vertices) f.coeffs.push_back(q0 + (p.x() / 2.0) * (q1 - q0));
  octaframe::update_projection(f);
  return f;
}

/// Unit box with the quadrant x > 1/2, y > 1/2 removed; features detected
/// from dihedral angles only.
inline octaframe::TetMesh l_shape_mesh(int n = 4) {
  octaframe::TetMesh box = octaframe::generate_box(n, n, 2);
  octaframe::TetMesh out;
  std::vector<int> remap(box.num_vertices(), -1);
  for (int t = 0; t < static_cast<int>(box.num_tets()); ++t) {
    const Vec3 c = box.tet_centroid(t);
    if (c.x() > 0.5 && c.y() > 0.5) continue;
    std::array<int, 4> tet = box.tets[t];
    for (int& v : tet) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(box.vertices[v]);
      }
      v = remap[v];
    }
    out.tets.push_back(tet);
  }
  octaframe::finalize_mesh(out);
  return out;
}


}  // namespace testing
