#pragma once

#include <array>

#include <Eigen/Core>

#include "octaframe/mesh.hpp"

namespace octaframe {

/// Degree-4 band coefficients of a frame, entry i holds order m = i - 4.
using Coeffs = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;

inline constexpr int kBandIndex(int m) { return m + 4; }

/// A representative rotation of an octahedral frame; the columns are the axes.
struct Frame {
  Mat3 R = Mat3::Identity();
  [[nodiscard]] Vec3 axis(int i) const { return R.col(i); }
};

/// sqrt(7/12) at m = 0 and sqrt(5/12) at m = +4: the axis-aligned frame.
const Coeffs& reference_coeffs();

/// Band-4 action of a rotation about z by `angle` radians. The (m, -m)
/// pair rotates by m * angle.
Mat9 z_rotation_block(double angle);

/// Band-4 action of the +90 degree rotation about x.
const Mat9& x_quarter_turn();

/// Generators of the band-4 action for infinitesimal rotations about x, y, z.
const std::array<Mat9, 3>& band4_generators();

/// D(R) through the ZYZ Euler decomposition R = Rz(a) Ry(b) Rz(c).
Mat9 band4_rotation(const Mat3& R);

/// Throws NotARotation if |R^T R - I| > 1e-8 or det(R) < 0.
Coeffs coeffs_from_rotation(const Mat3& R);

/// D(R) * reference without the orthogonality check; hot path of projection.
Coeffs rotate_reference(const Mat3& R);

struct Projection {
  Frame frame;
  Coeffs coeffs = Coeffs::Zero();
  /// <q / |q|, coeffs>, the cosine between the input and its projection.
  double alignment = 0.0;
  int iterations = 0;
  /// Ascent hit the iteration cap before the gradient vanished.
  bool stalled = false;
};

/// Closest exact frame to q (maximizes <q, D(R) reference>). Ascent runs in
/// the Lie algebra from the best of the fixed seeds (and the warm start, when
/// given). Throws InvalidArgument if |q| <= 1e-12.
Projection project_to_octahedral(const Coeffs& q, const Mat3* warm_start = nullptr);

/// The 8 fixed seed rotations: identity, 45 degrees about x, y and z, and
/// 60 degrees about the four cube diagonals (1,1,1), (1,1,-1), (1,-1,1), (-1,1,1).
const std::array<Mat3, 8>& projection_seeds();

/// Signed frame axis maximizing v . d; ties go to the lowest axis, then +.
Vec3 closest_direction(const Vec3& v, const Frame& frame);

/// Rotation group of the cube. Elements are the signed permutation matrices
/// of determinant +1, ordered by permutation (lexicographic) and then sign
/// pattern (+ before -, first row varies slowest). Element 0 is identity.
const std::array<Mat3, 24>& octahedral_group();
int group_multiply(int a, int b);
int group_inverse(int a);
/// Index of the element equal (to 1e-9) to a signed permutation matrix, or -1.
int group_index(const Mat3& g);

/// g minimizing the rotation angle between Ra * g and Rb (exhaustive search,
/// ties resolved by element order).
int octa_matching(const Frame& a, const Frame& b);

/// Rotation angle in radians of a rotation matrix, in [0, pi].
double rotation_angle(const Mat3& R);

/// Some rotation mapping +z onto the unit vector n.
Mat3 rotation_z_to(const Vec3& n);

/// Affine description of frames having one axis along n:
/// { h0 + c h1 + s h2 : c^2 + s^2 = 5/12 }.
struct TangencyBasis {
  Coeffs h0 = Coeffs::Zero();
  Coeffs h1 = Coeffs::Zero();
  Coeffs h2 = Coeffs::Zero();
};
TangencyBasis tangency_basis(const Vec3& n);

/// sqrt(7/12) D(R_v) e_0: the spin average of all frames with one axis along v.
Coeffs axisymmetric_coeffs(const Vec3& v);

}  // namespace octaframe
