#include "octaframe/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include "octaframe/error.hpp"

namespace octaframe {
namespace {

constexpr int kMaxAscentSteps = 200;

// c'_k = cos(k a) c_k - sin(k a) c_-k ; c'_-k = sin(k a) c_k + cos(k a) c_-k
void apply_z_rotation(Coeffs& c, double angle) {
  for (int k = 1; k <= 4; ++k) {
    const double ca = std::cos(k * angle), sa = std::sin(k * angle);
    const double p = c[4 + k], m = c[4 - k];
    c[4 + k] = ca * p - sa * m;
    c[4 - k] = sa * p + ca * m;
  }
}

struct EulerZYZ {
  double a, b, c;
};

EulerZYZ euler_zyz(const Mat3& R) {
  // a from the third column; c from a + c (or a - c near b = pi), which the
  // upper-left block determines well even when sin b vanishes.
  EulerZYZ e{};
  e.b = std::atan2(std::hypot(R(0, 2), R(1, 2)), R(2, 2));
  e.a = std::atan2(R(1, 2), R(0, 2));
  if (R(2, 2) >= 0.0) {
    e.c = std::atan2(R(1, 0) - R(0, 1), R(0, 0) + R(1, 1)) - e.a;
  } else {
    e.c = e.a - std::atan2(-(R(1, 0) + R(0, 1)), R(1, 1) - R(0, 0));
  }
  return e;
}

Mat3 orthonormalize(const Mat3& R) {
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    out = u * svd.matrixV().transpose();
  }
  return out;
}

Mat3 exp_so3(const Vec3& w) {
  const double angle = w.norm();
  if (angle < 1e-300) return Mat3::Identity();
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix();
}

Mat3 axis_angle(const Vec3& axis, double degrees) {
  return Eigen::AngleAxisd(degrees * std::numbers::pi / 180.0, axis.normalized()).toRotationMatrix();
}

struct GroupTables {
  std::array<Mat3, 24> elements;
  std::array<std::array<int, 24>, 24> product{};
  std::array<int, 24> inverse{};
};

const GroupTables& group_tables() {
  static const GroupTables tables = [] {
    GroupTables t;
    std::array<int, 3> perm{0, 1, 2};
    int n = 0;
    do {
      for (int s = 0; s < 8; ++s) {
        Mat3 m = Mat3::Zero();
        for (int row = 0; row < 3; ++row) {
          const bool negative = ((s >> (2 - row)) & 1) != 0;
          m(row, perm[row]) = negative ? -1.0 : 1.0;
        }
        if (m.determinant() > 0) t.elements[n++] = m;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
    auto find = [&](const Mat3& g) {
      for (int i = 0; i < 24; ++i) {
        if ((t.elements[i] - g).cwiseAbs().maxCoeff() < 1e-9) return i;
      }
      return -1;
    };
    for (int i = 0; i < 24; ++i) {
      for (int j = 0; j < 24; ++j) t.product[i][j] = find(t.elements[i] * t.elements[j]);
      t.inverse[i] = find(t.elements[i].transpose());
    }
    return t;
  }();
  return tables;
}

}  // namespace

const Coeffs& reference_coeffs() {
  static const Coeffs ref = [] {
    Coeffs c = Coeffs::Zero();
    c[kBandIndex(0)] = std::sqrt(7.0 / 12.0);
    c[kBandIndex(4)] = std::sqrt(5.0 / 12.0);
    return c;
  }();
  return ref;
}

Mat9 z_rotation_block(double angle) {
  Mat9 d = Mat9::Zero();
  d(4, 4) = 1.0;
  for (int k = 1; k <= 4; ++k) {
    const double ca = std::cos(k * angle), sa = std::sin(k * angle);
    d(4 + k, 4 + k) = ca;
    d(4 + k, 4 - k) = -sa;
    d(4 - k, 4 + k) = sa;
    d(4 - k, 4 - k) = ca;
  }
  return d;
}

const Mat9& x_quarter_turn() {
  static const Mat9 d = [] {
    const double s2 = std::sqrt(2.0), s5 = std::sqrt(5.0), s7 = std::sqrt(7.0);
    const double s14 = std::sqrt(14.0), s35 = std::sqrt(35.0);
    Mat9 m = Mat9::Zero();
    m(0, 5) = s14 / 4;  m(0, 7) = -s2 / 4;
    m(1, 1) = -0.75;    m(1, 3) = s7 / 4;
    m(2, 5) = s2 / 4;   m(2, 7) = s14 / 4;
    m(3, 1) = s7 / 4;   m(3, 3) = 0.75;
    m(4, 4) = 3.0 / 8;  m(4, 6) = s5 / 4;  m(4, 8) = s35 / 8;
    m(5, 0) = -s14 / 4; m(5, 2) = -s2 / 4;
    m(6, 4) = s5 / 4;   m(6, 6) = 0.5;     m(6, 8) = -s7 / 4;
    m(7, 0) = s2 / 4;   m(7, 2) = -s14 / 4;
    m(8, 4) = s35 / 8;  m(8, 6) = -s7 / 4; m(8, 8) = 1.0 / 8;
    return m;
  }();
  return d;
}

const std::array<Mat9, 3>& band4_generators() {
  static const std::array<Mat9, 3> gens = [] {
    Mat9 lz = Mat9::Zero();
    for (int k = 1; k <= 4; ++k) {
      lz(4 + k, 4 - k) = -k;
      lz(4 - k, 4 + k) = k;
    }
    const Mat9& dx = x_quarter_turn();
    // Ry(90) = Rx(-90) Rz(90) Rx(90) carries z onto x; Rx(-90) carries z onto y.
    const Mat9 dy90 = dx.transpose() * z_rotation_block(std::numbers::pi / 2) * dx;
    std::array<Mat9, 3> g;
    g[0] = dy90 * lz * dy90.transpose();
    g[1] = dx.transpose() * lz * dx;
    g[2] = lz;
    return g;
  }();
  return gens;
}

Mat9 band4_rotation(const Mat3& R) {
  const EulerZYZ e = euler_zyz(R);
  const Mat9& dx = x_quarter_turn();
  return z_rotation_block(e.a) * dx.transpose() * z_rotation_block(e.b) * dx * z_rotation_block(e.c);
}

Coeffs rotate_reference(const Mat3& R) {
  const EulerZYZ e = euler_zyz(R);
  const Mat9& dx = x_quarter_turn();
  Coeffs c = reference_coeffs();
  apply_z_rotation(c, e.c);
  c = dx * c;
  apply_z_rotation(c, e.b);
  c = dx.transpose() * c;
  apply_z_rotation(c, e.a);
  return c;
}

Coeffs coeffs_from_rotation(const Mat3& R) {
  if ((R.transpose() * R - Mat3::Identity()).norm() > 1e-8 || R.determinant() < 0) {
    throw Error(ErrorKind::NotARotation, "matrix is not a proper rotation");
  }
  return rotate_reference(R);
}

const std::array<Mat3, 8>& projection_seeds() {
  static const std::array<Mat3, 8> seeds = [] {
    std::array<Mat3, 8> s;
    s[0] = Mat3::Identity();
    s[1] = axis_angle(Vec3::UnitX(), 45.0);
    s[2] = axis_angle(Vec3::UnitY(), 45.0);
    s[3] = axis_angle(Vec3::UnitZ(), 45.0);
    s[4] = axis_angle(Vec3(1, 1, 1), 60.0);
    s[5] = axis_angle(Vec3(1, 1, -1), 60.0);
    s[6] = axis_angle(Vec3(1, -1, 1), 60.0);
    s[7] = axis_angle(Vec3(-1, 1, 1), 60.0);
    return s;
  }();
  return seeds;
}

Projection project_to_octahedral(const Coeffs& q, const Mat3* warm_start) {
  const double qn = q.norm();
  if (!(qn > 1e-12)) throw Error(ErrorKind::InvalidArgument, "cannot project a zero coefficient vector");

  static const std::array<Coeffs, 8> seed_coeffs = [] {
    std::array<Coeffs, 8> c;
    for (int i = 0; i < 8; ++i) c[i] = rotate_reference(projection_seeds()[i]);
    return c;
  }();

  Mat3 R = projection_seeds()[0];
  Coeffs f = seed_coeffs[0];
  double value = q.dot(f);
  for (int i = 1; i < 8; ++i) {
    const double v = q.dot(seed_coeffs[i]);
    if (v > value) {
      value = v;
      R = projection_seeds()[i];
      f = seed_coeffs[i];
    }
  }
  if (warm_start != nullptr) {
    const Coeffs fw = rotate_reference(*warm_start);
    const double v = q.dot(fw);
    if (v >= value) {
      value = v;
      R = *warm_start;
      f = fw;
    }
  }

  const auto& gens = band4_generators();
  const double initial_step = 3.0 / (20.0 * qn);
  double step = initial_step;
  Projection out;
  bool converged = false;
  int it = 0;
  Vec3 grad(q.dot(gens[0] * f), q.dot(gens[1] * f), q.dot(gens[2] * f));
  for (; it < kMaxAscentSteps; ++it) {
    const double gnorm = grad.norm();
    if (gnorm < 1e-10 * qn) {
      converged = true;
      break;
    }
    bool improved = false;
    while (step > 1e-12 * initial_step) {
      const Mat3 Rt = exp_so3(step * grad) * R;
      const Coeffs ft = rotate_reference(Rt);
      const double vt = q.dot(ft);
      // Near the optimum the value change drops below rounding; fall back to
      // the gradient norm to decide.
      const bool flat = vt >= value - 1e-15 * qn;
      Vec3 gt = Vec3::Zero();
      if (flat) gt = Vec3(q.dot(gens[0] * ft), q.dot(gens[1] * ft), q.dot(gens[2] * ft));
      if (vt > value + 1e-15 * qn || (flat && gt.norm() < gnorm)) {
        R = Rt;
        f = ft;
        value = std::max(value, vt);
        grad = gt;
        improved = true;
        step = std::min(2.0 * step, initial_step);
        break;
      }
      step *= 0.5;
    }
    if (!improved) {
      converged = true;  // numerically stationary
      break;
    }
  }

  out.frame.R = orthonormalize(R);
  out.coeffs = rotate_reference(out.frame.R);
  out.alignment = q.dot(out.coeffs) / qn;
  out.iterations = it;
  out.stalled = !converged;
  return out;
}

Vec3 closest_direction(const Vec3& v, const Frame& frame) {
  Vec3 best = frame.R.col(0);
  double best_dot = v.dot(best);
  for (int i = 0; i < 3; ++i) {
    for (double sign : {1.0, -1.0}) {
      const Vec3 d = sign * frame.R.col(i);
      const double dot = v.dot(d);
      if (dot > best_dot) {
        best_dot = dot;
        best = d;
      }
    }
  }
  return best;
}

const std::array<Mat3, 24>& octahedral_group() { return group_tables().elements; }

int group_multiply(int a, int b) { return group_tables().product[a][b]; }

int group_inverse(int a) { return group_tables().inverse[a]; }

int group_index(const Mat3& g) {
  const auto& el = group_tables().elements;
  for (int i = 0; i < 24; ++i) {
    if ((el[i] - g).cwiseAbs().maxCoeff() < 1e-9) return i;
  }
  return -1;
}

int octa_matching(const Frame& a, const Frame& b) {
  const Mat3 m = a.R.transpose() * b.R;
  const auto& el = group_tables().elements;
  int best = 0;
  double best_trace = (el[0].transpose() * m).trace();
  for (int i = 1; i < 24; ++i) {
    const double tr = (el[i].transpose() * m).trace();
    if (tr > best_trace) {
      best_trace = tr;
      best = i;
    }
  }
  return best;
}

double rotation_angle(const Mat3& R) {
  const Vec3 w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  return std::atan2(0.5 * w.norm(), 0.5 * (R.trace() - 1.0));
}

Mat3 rotation_z_to(const Vec3& n) {
  const Vec3 z = Vec3::UnitZ();
  const Vec3 u = n.normalized();
  const Vec3 axis = z.cross(u);
  const double s = axis.norm();
  const double c = z.dot(u);
  if (s < 1e-14) {
    if (c > 0) return Mat3::Identity();
    return Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  }
  return Eigen::AngleAxisd(std::atan2(s, c), axis / s).toRotationMatrix();
}

TangencyBasis tangency_basis(const Vec3& n) {
  const Mat9 d = band4_rotation(rotation_z_to(n));
  TangencyBasis b;
  b.h0 = std::sqrt(7.0 / 12.0) * d.col(kBandIndex(0));
  b.h1 = d.col(kBandIndex(4));
  b.h2 = d.col(kBandIndex(-4));
  return b;
}

Coeffs axisymmetric_coeffs(const Vec3& v) {
  return std::sqrt(7.0 / 12.0) * band4_rotation(rotation_z_to(v)).col(kBandIndex(0));
}

}  // namespace octaframe
