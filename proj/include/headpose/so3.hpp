// Copyright 2026 The headpose Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Rotation types and conversions between Euler angles, unit quaternions, the
// 6D column representation and axis-angle vectors.
//
// Euler angles follow the head-pose convention
//
//   R(pitch, yaw, roll) = Z(roll) * Y(yaw) * X(pitch)
//
// with the elementary matrices
//
//   Z(a) = [ cos a  sin a  0 ]   Y(a) = [ cos a  0  -sin a ]   X(a) = [ 1    0      0   ]
//          [-sin a  cos a  0 ]          [   0    1    0    ]          [ 0  cos a  sin a ]
//          [   0      0    1 ]          [ sin a  0   cos a ]          [ 0 -sin a  cos a ]
//
// i.e. the transposes of the usual right-handed active rotations. Everything
// else in the library keys off euler_to_rotation(), so this is the one place
// where the convention lives. At yaw = +-90 deg pitch and roll act about the
// same axis and only pitch + roll (yaw = 90) or roll - pitch (yaw = -90) is
// observable.

#ifndef HEADPOSE_SO3_HPP_
#define HEADPOSE_SO3_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "headpose/errors.hpp"

namespace headpose {

template <typename T>
using Matrix3 = Eigen::Matrix<T, 3, 3>;
template <typename T>
using Vector3 = Eigen::Matrix<T, 3, 1>;

template <typename T>
constexpr T deg_to_rad(T deg) {
  return deg * std::numbers::pi_v<T> / T(180);
}

template <typename T>
constexpr T rad_to_deg(T rad) {
  return rad * T(180) / std::numbers::pi_v<T>;
}

/// Maps an angle in degrees to [-180, 180).
template <typename T>
T wrap_degrees(T deg) {
  T wrapped = std::fmod(deg + T(180), T(360));
  if (wrapped < T(0)) wrapped += T(360);
  return wrapped - T(180);
}

namespace so3_tolerance {
/// Frobenius defect of R^T R - I (and |det R - 1|) accepted by RotationMatrix.
inline constexpr double kOrthonormality = 1e-9;
/// Quaternion norm defect that is silently renormalized.
inline constexpr double kQuaternionNorm = 1e-6;
/// |cos yaw| below which a matrix is decomposed as an exact gimbal lock.
inline constexpr double kGimbalCosYaw = 1e-9;
/// Norm below which a 6D column counts as zero / the columns as parallel.
inline constexpr double kSixDDegenerate = 1e-12;
}  // namespace so3_tolerance

/// Frobenius norm of R^T R - I and |det R - 1|, whichever is larger.
template <typename T>
T orthonormality_defect(const Matrix3<T>& m) {
  const T ortho = (m.transpose() * m - Matrix3<T>::Identity()).norm();
  const T det = std::abs(m.determinant() - T(1));
  return std::max(ortho, det);
}

/// A proper rotation matrix. Construction through from_matrix() checks
/// orthonormality and det = +1; the library's own producers go through
/// unchecked() since their outputs are rotations by construction.
template <typename T>
class RotationMatrix {
 public:
  using Scalar = T;

  RotationMatrix() : m_(Matrix3<T>::Identity()) {}

  static RotationMatrix identity() { return RotationMatrix(); }

  static RotationMatrix from_matrix(const Matrix3<T>& m) {
    if (!m.allFinite()) {
      throw InvalidArgument("rotation matrix has non-finite entries");
    }
    const T defect = orthonormality_defect(m);
    if (!(defect <= T(so3_tolerance::kOrthonormality))) {
      std::ostringstream msg;
      msg << "matrix is not a rotation (defect " << defect << ")";
      throw InvalidArgument(msg.str());
    }
    return RotationMatrix(m);
  }

  /// Nearest rotation in the Frobenius sense (polar factor via SVD).
  static RotationMatrix project(const Matrix3<T>& m) {
    if (!m.allFinite()) {
      throw InvalidArgument("rotation matrix has non-finite entries");
    }
    Eigen::JacobiSVD<Matrix3<T>> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3<T> u = svd.matrixU();
    const Matrix3<T> v = svd.matrixV();
    if ((u * v.transpose()).determinant() < T(0)) u.col(2) *= T(-1);
    return RotationMatrix(u * v.transpose());
  }

  static RotationMatrix unchecked(const Matrix3<T>& m) { return RotationMatrix(m); }

  const Matrix3<T>& matrix() const { return m_; }
  T operator()(int row, int col) const { return m_(row, col); }

  RotationMatrix inverse() const { return RotationMatrix(m_.transpose()); }
  RotationMatrix transpose() const { return inverse(); }

  friend RotationMatrix operator*(const RotationMatrix& a, const RotationMatrix& b) {
    return RotationMatrix(a.m_ * b.m_);
  }

  Vector3<T> operator*(const Vector3<T>& v) const { return m_ * v; }

 private:
  explicit RotationMatrix(const Matrix3<T>& m) : m_(m) {}

  Matrix3<T> m_;
};

/// Pitch, yaw and roll in degrees.
template <typename T>
struct EulerAnglesPYR {
  T pitch{0};
  T yaw{0};
  T roll{0};

  bool operator==(const EulerAnglesPYR&) const = default;
};

/// Hamilton unit quaternion, w + xi + yj + zk.
template <typename T>
struct UnitQuaternion {
  T w{1};
  T x{0};
  T y{0};
  T z{0};

  std::array<T, 4> components() const { return {w, x, y, z}; }
  UnitQuaternion operator-() const { return {-w, -x, -y, -z}; }
  T squared_norm() const { return w * w + x * x + y * y + z * z; }
};

/// First two columns of a rotation matrix; any non-degenerate pair is accepted
/// on input and orthonormalized by sixd_to_rotation().
template <typename T>
struct SixD {
  Vector3<T> c1 = Vector3<T>::UnitX();
  Vector3<T> c2 = Vector3<T>::UnitY();
};

/// Rotation vector: direction is the axis, norm the angle in radians.
template <typename T>
struct AxisAngle {
  Vector3<T> v = Vector3<T>::Zero();

  T angle() const { return v.norm(); }
};

using Rotation = RotationMatrix<double>;
using EulerAngles = EulerAnglesPYR<double>;
using Quaternion = UnitQuaternion<double>;
using SixDRep = SixD<double>;
using RotationVector = AxisAngle<double>;

// ---------------------------------------------------------------------------
// Euler angles.

template <typename T>
Matrix3<T> elementary_x(T pitch_rad) {
  const T c = std::cos(pitch_rad), s = std::sin(pitch_rad);
  Matrix3<T> m;
  m << T(1), T(0), T(0),
       T(0), c, s,
       T(0), -s, c;
  return m;
}

template <typename T>
Matrix3<T> elementary_y(T yaw_rad) {
  const T c = std::cos(yaw_rad), s = std::sin(yaw_rad);
  Matrix3<T> m;
  m << c, T(0), -s,
       T(0), T(1), T(0),
       s, T(0), c;
  return m;
}

template <typename T>
Matrix3<T> elementary_z(T roll_rad) {
  const T c = std::cos(roll_rad), s = std::sin(roll_rad);
  Matrix3<T> m;
  m << c, s, T(0),
       -s, c, T(0),
       T(0), T(0), T(1);
  return m;
}

template <typename T>
RotationMatrix<T> euler_to_rotation(const EulerAnglesPYR<T>& e) {
  if (!std::isfinite(e.pitch) || !std::isfinite(e.yaw) || !std::isfinite(e.roll)) {
    throw InvalidArgument("Euler angles must be finite");
  }
  return RotationMatrix<T>::unchecked(elementary_z(deg_to_rad(e.roll)) *
                                      elementary_y(deg_to_rad(e.yaw)) *
                                      elementary_x(deg_to_rad(e.pitch)));
}

/// Principal decomposition: yaw in [-90, 90], pitch and roll in [-180, 180).
/// At gimbal lock roll is set to 0 and pitch carries the combined angle.
template <typename T>
EulerAnglesPYR<T> rotation_to_euler(const RotationMatrix<T>& rotation) {
  const Matrix3<T>& r = rotation.matrix();
  // Row 2 is (sin y, -sin p cos y, cos p cos y).
  const T cos_yaw = std::hypot(r(2, 1), r(2, 2));
  EulerAnglesPYR<T> e;
  if (cos_yaw < T(so3_tolerance::kGimbalCosYaw)) {
    if (r(2, 0) > T(0)) {
      // Row 0/1, column 1 hold sin and cos of pitch + roll.
      e.yaw = T(90);
      e.pitch = rad_to_deg(std::atan2(r(0, 1), r(1, 1)));
    } else {
      // Same entries hold sin and cos of roll - pitch.
      e.yaw = T(-90);
      e.pitch = -rad_to_deg(std::atan2(r(0, 1), r(1, 1)));
    }
    e.roll = T(0);
  } else {
    const T yaw = std::atan2(r(2, 0), cos_yaw);
    const T pitch = std::atan2(-r(2, 1), r(2, 2));
    // Recover roll from Z(roll) = R X(pitch)^T Y(yaw)^T, whose entries are O(1)
    // even near the gimbal, so pitch + roll stays consistent with R.
    const Matrix3<T> z = r * elementary_x(pitch).transpose() * elementary_y(yaw).transpose();
    const T roll = std::atan2(z(0, 1), z(0, 0));
    e.yaw = rad_to_deg(yaw);
    e.pitch = rad_to_deg(pitch);
    e.roll = rad_to_deg(roll);
  }
  e.pitch = wrap_degrees(e.pitch);
  e.roll = wrap_degrees(e.roll);
  return e;
}

/// The other Euler triple of the same rotation, (p + 180, 180 - y, r + 180),
/// wrapped to [-180, 180).
template <typename T>
EulerAnglesPYR<T> alternate_euler(const EulerAnglesPYR<T>& e) {
  return {wrap_degrees(e.pitch + T(180)), wrap_degrees(T(180) - e.yaw),
          wrap_degrees(e.roll + T(180))};
}

/// Wide-range decomposition: |pitch| <= 90 and yaw in [-180, 180). This is
/// the branch where a head turned past profile reports |yaw| > 90.
template <typename T>
EulerAnglesPYR<T> rotation_to_euler_wide(const RotationMatrix<T>& rotation) {
  const EulerAnglesPYR<T> principal = rotation_to_euler(rotation);
  if (std::abs(principal.pitch) <= T(90)) return principal;
  return alternate_euler(principal);
}

// ---------------------------------------------------------------------------
// Quaternions.

/// w >= 0; when w == 0 the first nonzero of (x, y, z) is made positive.
template <typename T>
UnitQuaternion<T> canonicalize(const UnitQuaternion<T>& q) {
  if (q.w > T(0)) return q;
  if (q.w < T(0)) return -q;
  for (T c : {q.x, q.y, q.z}) {
    if (c > T(0)) return q;
    if (c < T(0)) return -q;
  }
  return q;
}

/// Validates the norm: within kQuaternionNorm of 1 it renormalizes, beyond it
/// throws.
template <typename T>
UnitQuaternion<T> make_unit_quaternion(T w, T x, T y, T z) {
  UnitQuaternion<T> q{w, x, y, z};
  for (T c : q.components()) {
    if (!std::isfinite(c)) throw InvalidArgument("quaternion has non-finite components");
  }
  const T norm = std::sqrt(q.squared_norm());
  if (std::abs(norm - T(1)) > T(so3_tolerance::kQuaternionNorm)) {
    std::ostringstream msg;
    msg << "quaternion is not unit (norm " << norm << ")";
    throw InvalidArgument(msg.str());
  }
  return {w / norm, x / norm, y / norm, z / norm};
}

template <typename T>
RotationMatrix<T> quat_to_rotation(const UnitQuaternion<T>& q_in) {
  const UnitQuaternion<T> q = make_unit_quaternion(q_in.w, q_in.x, q_in.y, q_in.z);
  const T w = q.w, x = q.x, y = q.y, z = q.z;
  Matrix3<T> m;
  m << T(1) - T(2) * (y * y + z * z), T(2) * (x * y - w * z), T(2) * (x * z + w * y),
       T(2) * (x * y + w * z), T(1) - T(2) * (x * x + z * z), T(2) * (y * z - w * x),
       T(2) * (x * z - w * y), T(2) * (y * z + w * x), T(1) - T(2) * (x * x + y * y);
  return RotationMatrix<T>::unchecked(m);
}

/// Shepperd's method: pivot on the largest of w^2, x^2, y^2, z^2.
template <typename T>
UnitQuaternion<T> rotation_to_quat(const RotationMatrix<T>& rotation) {
  const Matrix3<T>& m = rotation.matrix();
  const T trace = m.trace();
  const std::array<T, 4> pivots = {trace, m(0, 0), m(1, 1), m(2, 2)};
  const auto best = static_cast<int>(std::max_element(pivots.begin(), pivots.end()) -
                                     pivots.begin());
  UnitQuaternion<T> q;
  switch (best) {
    case 0: {
      const T s = std::sqrt(T(1) + trace) * T(2);  // 4w
      q = {s / T(4), (m(2, 1) - m(1, 2)) / s, (m(0, 2) - m(2, 0)) / s, (m(1, 0) - m(0, 1)) / s};
      break;
    }
    case 1: {
      const T s = std::sqrt(T(1) + m(0, 0) - m(1, 1) - m(2, 2)) * T(2);  // 4x
      q = {(m(2, 1) - m(1, 2)) / s, s / T(4), (m(0, 1) + m(1, 0)) / s, (m(0, 2) + m(2, 0)) / s};
      break;
    }
    case 2: {
      const T s = std::sqrt(T(1) + m(1, 1) - m(0, 0) - m(2, 2)) * T(2);  // 4y
      q = {(m(0, 2) - m(2, 0)) / s, (m(0, 1) + m(1, 0)) / s, s / T(4), (m(1, 2) + m(2, 1)) / s};
      break;
    }
    default: {
      const T s = std::sqrt(T(1) + m(2, 2) - m(0, 0) - m(1, 1)) * T(2);  // 4z
      q = {(m(1, 0) - m(0, 1)) / s, (m(0, 2) + m(2, 0)) / s, (m(1, 2) + m(2, 1)) / s, s / T(4)};
      break;
    }
  }
  const T norm = std::sqrt(q.squared_norm());
  q = {q.w / norm, q.x / norm, q.y / norm, q.z / norm};
  return canonicalize(q);
}

// ---------------------------------------------------------------------------
// 6D representation.

template <typename T>
RotationMatrix<T> sixd_to_rotation(const SixD<T>& s) {
  if (!s.c1.allFinite() || !s.c2.allFinite()) {
    throw InvalidArgument("6D representation has non-finite entries");
  }
  const T n1 = s.c1.norm();
  if (n1 <= T(so3_tolerance::kSixDDegenerate)) {
    throw DegenerateRepresentation("6D first column is zero");
  }
  const Vector3<T> b1 = s.c1 / n1;
  const Vector3<T> residual = s.c2 - b1.dot(s.c2) * b1;
  const T n2 = residual.norm();
  if (n2 <= T(so3_tolerance::kSixDDegenerate)) {
    throw DegenerateRepresentation("6D columns are parallel");
  }
  const Vector3<T> b2 = residual / n2;
  Matrix3<T> m;
  m.col(0) = b1;
  m.col(1) = b2;
  m.col(2) = b1.cross(b2);
  return RotationMatrix<T>::unchecked(m);
}

template <typename T>
SixD<T> rotation_to_sixd(const RotationMatrix<T>& r) {
  return {r.matrix().col(0), r.matrix().col(1)};
}

// ---------------------------------------------------------------------------
// Exponential and logarithm maps.

template <typename T>
Matrix3<T> hat(const Vector3<T>& v) {
  Matrix3<T> m;
  m << T(0), -v.z(), v.y(),
       v.z(), T(0), -v.x(),
       -v.y(), v.x(), T(0);
  return m;
}

/// Axial vector of the skew part, vee((M - M^T) / 2).
template <typename T>
Vector3<T> skew_axial(const Matrix3<T>& m) {
  return Vector3<T>(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)) / T(2);
}

/// Rotation angle in radians, [0, pi]. atan2 of the sine (skew part) and
/// cosine (trace) stays accurate at both ends of the range.
template <typename T>
T rotation_angle(const Matrix3<T>& m) {
  const T cos_theta = std::clamp((m.trace() - T(1)) / T(2), T(-1), T(1));
  const T sin_theta = skew_axial(m).norm();
  return std::atan2(sin_theta, cos_theta);
}

namespace so3_detail {
inline constexpr double kSmallAngle = 1e-7;
// Past this angle the axis is read off the symmetric part instead of dividing
// the skew part by sin(theta).
inline constexpr double kNearPi = 3.0;
}  // namespace so3_detail

/// Rodrigues' formula.
template <typename T>
RotationMatrix<T> exp_map(const AxisAngle<T>& aa) {
  if (!aa.v.allFinite()) throw InvalidArgument("rotation vector must be finite");
  const T theta = aa.v.norm();
  const Matrix3<T> k = hat(aa.v);
  T a, b;  // sin(t)/t and (1 - cos(t))/t^2
  if (theta < T(so3_detail::kSmallAngle)) {
    const T t2 = theta * theta;
    a = T(1) - t2 / T(6);
    b = T(0.5) - t2 / T(24);
  } else {
    a = std::sin(theta) / theta;
    b = (T(1) - std::cos(theta)) / (theta * theta);
  }
  return RotationMatrix<T>::unchecked(Matrix3<T>::Identity() + a * k + b * k * k);
}

/// Canonical rotation vector with |v| in [0, pi]. At exactly pi the axis is
/// the one whose largest component is positive.
template <typename T>
AxisAngle<T> log_map(const RotationMatrix<T>& rotation) {
  const Matrix3<T>& m = rotation.matrix();
  const Vector3<T> axial = skew_axial(m);  // sin(theta) * axis
  const T theta = rotation_angle(m);
  if (theta < T(so3_detail::kSmallAngle)) {
    // theta / sin(theta) ~ 1 + theta^2 / 6
    return {axial * (T(1) + theta * theta / T(6))};
  }
  if (theta < T(so3_detail::kNearPi)) {
    return {axial * (theta / std::sin(theta))};
  }
  // (M + M^T)/2 = cos(t) I + (1 - cos(t)) n n^T
  const T cos_theta = std::cos(theta);
  const Matrix3<T> outer =
      ((m + m.transpose()) / T(2) - cos_theta * Matrix3<T>::Identity()) / (T(1) - cos_theta);
  int k = 0;
  outer.diagonal().maxCoeff(&k);
  Vector3<T> axis = outer.col(k) / std::sqrt(std::max(outer(k, k), T(0)));
  axis.normalize();
  if (axis.dot(axial) < T(0)) axis = -axis;
  return {axis * theta};
}

// ---------------------------------------------------------------------------
// Group operations.

template <typename T>
RotationMatrix<T> compose(const RotationMatrix<T>& a, const RotationMatrix<T>& b) {
  return a * b;
}

template <typename T>
RotationMatrix<T> inverse(const RotationMatrix<T>& r) {
  return r.inverse();
}

// ---------------------------------------------------------------------------
// Sampling.

/// Closed interval of angles in degrees.
struct DegreeInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Seeded sampler of Euler-angle poses. Single owner; not thread safe.
class RotationSampler {
 public:
  explicit RotationSampler(std::uint64_t seed) : engine_(seed) {}

  EulerAngles sample_euler(const DegreeInterval& yaw, const DegreeInterval& pitch,
                           const DegreeInterval& roll) {
    // Drawn in pitch, yaw, roll order so sequences are reproducible.
    const double p = uniform(pitch);
    const double y = uniform(yaw);
    const double r = uniform(roll);
    return {p, y, r};
  }

  Rotation sample(const DegreeInterval& yaw, const DegreeInterval& pitch,
                  const DegreeInterval& roll) {
    return euler_to_rotation(sample_euler(yaw, pitch, roll));
  }

  /// Haar-uniform rotation (normalized Gaussian quaternion).
  Rotation sample_uniform() {
    std::normal_distribution<double> n(0.0, 1.0);
    double w = n(engine_), x = n(engine_), y = n(engine_), z = n(engine_);
    const double norm = std::sqrt(w * w + x * x + y * y + z * z);
    return quat_to_rotation(Quaternion{w / norm, x / norm, y / norm, z / norm});
  }

  /// Isotropic tangent-space perturbation: each axis ~ N(0, (rms/sqrt 3)^2),
  /// so the RMS rotation angle is `rms_deg`.
  RotationVector sample_noise(double rms_deg) {
    const double sigma = deg_to_rad(rms_deg) / std::sqrt(3.0);
    std::normal_distribution<double> n(0.0, 1.0);
    Vector3<double> v;
    for (int i = 0; i < 3; ++i) v(i) = sigma * n(engine_);
    return {v};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  double uniform(const DegreeInterval& range) {
    if (!(range.lo <= range.hi) || !std::isfinite(range.lo) || !std::isfinite(range.hi)) {
      throw InvalidArgument("angle range must satisfy lo <= hi");
    }
    if (range.lo == range.hi) return range.lo;
    std::uniform_real_distribution<double> u(range.lo, range.hi);
    return u(engine_);
  }

  std::mt19937_64 engine_;
};

/// One draw from a fresh sampler seeded with `seed`.
inline Rotation random_rotation(const DegreeInterval& yaw, const DegreeInterval& pitch,
                                const DegreeInterval& roll, std::uint64_t seed) {
  RotationSampler sampler(seed);
  return sampler.sample(yaw, pitch, roll);
}

}  // namespace headpose

#endif  // HEADPOSE_SO3_HPP_
