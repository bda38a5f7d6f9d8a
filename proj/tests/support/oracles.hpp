#pragma once

// Test-only reference computations, written independently of the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Coeffs = Eigen::Matrix<double, 9, 1>;

/// Real orthonormal degree-4 harmonics at a unit vector, ordered m = -4..4.
inline Coeffs sh4(const Vec3& p) {
  const double x = p.x(), y = p.y(), z = p.z();
  const double pi = std::numbers::pi;
  const double z2 = z * z;
  Coeffs y4;
  y4[0] = 0.75 * std::sqrt(35.0 / pi) * x * y * (x * x - y * y);
  y4[1] = 0.75 * std::sqrt(35.0 / (2.0 * pi)) * (3.0 * x * x - y * y) * y * z;
  y4[2] = 0.75 * std::sqrt(5.0 / pi) * x * y * (7.0 * z2 - 1.0);
  y4[3] = 0.75 * std::sqrt(5.0 / (2.0 * pi)) * y * z * (7.0 * z2 - 3.0);
  y4[4] = 3.0 / 16.0 * std::sqrt(1.0 / pi) * (35.0 * z2 * z2 - 30.0 * z2 + 3.0);
  y4[5] = 0.75 * std::sqrt(5.0 / (2.0 * pi)) * x * z * (7.0 * z2 - 3.0);
  y4[6] = 3.0 / 8.0 * std::sqrt(5.0 / pi) * (x * x - y * y) * (7.0 * z2 - 1.0);
  y4[7] = 0.75 * std::sqrt(35.0 / (2.0 * pi)) * (x * x - 3.0 * y * y) * x * z;
  y4[8] = 3.0 / 16.0 * std::sqrt(35.0 / pi) * (x * x * (x * x - 3.0 * y * y) - y * y * (3.0 * x * x - y * y));
  return y4;
}

/// Fibonacci sphere points.
inline std::vector<Vec3> sphere_points(int n) {
  std::vector<Vec3> pts;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int i = 0; i < n; ++i) {
    const double z = 1.0 - 2.0 * (i + 0.5) / n;
    const double r = std::sqrt(1.0 - z * z);
    pts.emplace_back(r * std::cos(golden * i), r * std::sin(golden * i), z);
  }
  return pts;
}

/// Band-4 coefficients of the frame with axes R.col(i): least-squares fit of
/// sum_i (a_i . p)^4 - 3/5 on sample points, scaled to unit norm.
inline Coeffs frame_coeffs(const Mat3& R, int samples = 800) {
  const auto pts = sphere_points(samples);
  Eigen::MatrixXd A(samples, 9);
  Eigen::VectorXd b(samples);
  for (int i = 0; i < samples; ++i) {
    A.row(i) = sh4(pts[i]).transpose();
    double f = -0.6;
    for (int k = 0; k < 3; ++k) f += std::pow(R.col(k).dot(pts[i]), 4);
    b[i] = f;
  }
  const Coeffs c = A.colPivHouseholderQr().solve(b);
  return c / c.norm();
}

/// Band-4 coefficients of sum_i (a_i . p)^4 averaged over spins about v.
inline Coeffs spin_average(const Vec3& v, int spins = 720, int samples = 800) {
  const Vec3 a = v.normalized();
  const Vec3 u = (std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY()).cross(a).normalized();
  const Vec3 w = a.cross(u);
  Coeffs sum = Coeffs::Zero();
  for (int s = 0; s < spins; ++s) {
    const double t = 2.0 * std::numbers::pi * s / spins;
    Mat3 R;
    R.col(0) = a;
    R.col(1) = std::cos(t) * u + std::sin(t) * w;
    R.col(2) = a.cross(R.col(1));
    sum += frame_coeffs(R, samples);
  }
  return sum / spins;
}

/// P1 stiffness of one tet from the inverse Jacobian.
inline Eigen::Matrix4d tet_stiffness(const std::array<Vec3, 4>& p) {
  Mat3 J;
  for (int k = 0; k < 3; ++k) J.col(k) = p[k + 1] - p[0];
  const double vol = std::abs(J.determinant()) / 6.0;
  const Mat3 Jinv = J.inverse();
  Eigen::Matrix<double, 4, 3> g;
  g.row(1) = Jinv.row(0);
  g.row(2) = Jinv.row(1);
  g.row(3) = Jinv.row(2);
  g.row(0) = -(g.row(1) + g.row(2) + g.row(3));
  return vol * g * g.transpose();
}

inline Mat3 axis_angle(const Vec3& axis, double angle) {
  return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

/// Minimal angle between two frames over the 24 axis relabelings.
inline double frame_distance(const Mat3& A, const Mat3& B) {
  double best = 10.0;
  const Mat3 M = A.transpose() * B;
  std::array<int, 3> perm{0, 1, 2};
  do {
    for (int s = 0; s < 8; ++s) {
      Mat3 P = Mat3::Zero();
      for (int i = 0; i < 3; ++i) P(perm[i], i) = (s >> i & 1) ? -1.0 : 1.0;
      if (P.determinant() < 0) continue;
      const double r = (M * P - Mat3::Identity()).norm() / (2.0 * std::sqrt(2.0));
      best = std::min(best, 2.0 * std::asin(std::min(1.0, r)));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Exit height at x = x1 of the streamline from (x0, y0) along +x through the
/// field whose coefficients blend linearly from the identity frame at x = 0
/// to Rz(theta) at x = 2. The interpolated frame is Rz(phi(x)) with
/// phi = arg((1 - s) + s e^{4 i theta}) / 4, s = x / 2, so dy/dx = tan(phi).
/// Composite Simpson with 2e5 panels.
inline double twist_exit_height(double theta, double x0, double y0, double x1 = 2.0) {
  const auto slope = [theta](double x) {
    const double s = x / 2.0;
    return std::tan(std::arg(std::complex<double>(1.0 - s + s * std::cos(4 * theta), s * std::sin(4 * theta))) / 4.0);
  };
  const int n = 200000;
  const double h = (x1 - x0) / n;
  double sum = slope(x0) + slope(x1);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * slope(x0 + i * h);
  return y0 + sum * h / 3.0;
}

}  // namespace oracle
