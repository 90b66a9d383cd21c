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

// Pose distances. Euler-angle metrics take (estimate, truth) triples in
// degrees; matrix metrics take rotations. Angular results are in degrees,
// Frobenius-based ones are unitless.

#ifndef HEADPOSE_METRICS_HPP_
#define HEADPOSE_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "headpose/errors.hpp"
#include "headpose/so3.hpp"

namespace headpose {

template <typename T>
using EulerTriple = EulerAnglesPYR<T>;

enum class MetricId { kMae, kMse, kRmse, kEuc, kWrappedYaw, kChordal, kDevIdentity, kGeodesic };

inline const char* metric_name(MetricId id) {
  switch (id) {
    case MetricId::kMae: return "mae";
    case MetricId::kMse: return "mse";
    case MetricId::kRmse: return "rmse";
    case MetricId::kEuc: return "euc";
    case MetricId::kWrappedYaw: return "wrapped_yaw";
    case MetricId::kChordal: return "chordal";
    case MetricId::kDevIdentity: return "dev_identity";
    case MetricId::kGeodesic: return "geodesic";
  }
  return "unknown";
}

struct MetricResult {
  double value = 0.0;
  MetricId metric_id = MetricId::kGeodesic;
};

enum class NormOrder { kL1 = 1, kL2 = 2 };

namespace metrics_detail {
template <typename T>
void require_finite(T a) {
  if (!std::isfinite(a)) throw InvalidArgument("angle must be finite");
}
template <typename T>
void require_finite(const EulerTriple<T>& e) {
  require_finite(e.pitch);
  require_finite(e.yaw);
  require_finite(e.roll);
}
}  // namespace metrics_detail

/// Periodic difference of two angles, in [0, 180]. For scalars the L1 and L2
/// norms coincide; the order is kept so call sites read like the metric they
/// implement.
template <typename T>
T wrapped_diff(T a, T b, NormOrder order = NormOrder::kL1) {
  (void)order;
  metrics_detail::require_finite(a);
  metrics_detail::require_finite(b);
  T d = std::fmod(std::abs(a - b), T(360));
  return std::min(d, T(360) - d);
}

/// Raw L1 distance of the Euler triples; no wrapping.
template <typename T>
T g_mae(const EulerTriple<T>& estimate, const EulerTriple<T>& truth) {
  metrics_detail::require_finite(estimate);
  metrics_detail::require_finite(truth);
  return std::abs(estimate.pitch - truth.pitch) + std::abs(estimate.yaw - truth.yaw) +
         std::abs(estimate.roll - truth.roll);
}

/// Squared L2 distance of the raw Euler triples, degrees^2.
template <typename T>
T g_mse(const EulerTriple<T>& estimate, const EulerTriple<T>& truth) {
  metrics_detail::require_finite(estimate);
  metrics_detail::require_finite(truth);
  const T dp = estimate.pitch - truth.pitch;
  const T dy = estimate.yaw - truth.yaw;
  const T dr = estimate.roll - truth.roll;
  return dp * dp + dy * dy + dr * dr;
}

template <typename T>
T g_rmse(const EulerTriple<T>& estimate, const EulerTriple<T>& truth) {
  return std::sqrt(g_mse(estimate, truth));
}

/// Sum of the per-component periodic differences.
template <typename T>
T g_euc(const EulerTriple<T>& estimate, const EulerTriple<T>& truth) {
  return wrapped_diff(estimate.pitch, truth.pitch) + wrapped_diff(estimate.yaw, truth.yaw) +
         wrapped_diff(estimate.roll, truth.roll);
}

template <typename T>
T g_wrapped_yaw(T estimate_yaw, T truth_yaw) {
  return wrapped_diff(estimate_yaw, truth_yaw, NormOrder::kL2);
}

/// ||R - R_hat||_F
template <typename T>
T g_chordal(const RotationMatrix<T>& estimate, const RotationMatrix<T>& truth) {
  return (truth.matrix() - estimate.matrix()).norm();
}

/// ||I - R_hat R^T||_F
template <typename T>
T g_dev_identity(const RotationMatrix<T>& estimate, const RotationMatrix<T>& truth) {
  return (Matrix3<T>::Identity() - estimate.matrix() * truth.matrix().transpose()).norm();
}

/// Angle of R_hat R^T in degrees, [0, 180]. Equal to
/// acos(clamp((tr(R_hat R^T) - 1) / 2)) but evaluated through atan2 so small
/// and near-antipodal distances keep full precision.
template <typename T>
T g_geodesic(const RotationMatrix<T>& estimate, const RotationMatrix<T>& truth) {
  return rad_to_deg(rotation_angle<T>(estimate.matrix() * truth.matrix().transpose()));
}

namespace metrics_detail {
inline void require_pairs(std::size_t estimates, std::size_t truths) {
  if (estimates != truths) {
    throw InvalidArgument("estimate and truth sequences differ in length (" +
                          std::to_string(estimates) + " vs " + std::to_string(truths) + ")");
  }
  if (estimates == 0) throw EmptyInput("no pose pairs to aggregate");
}
}  // namespace metrics_detail

/// Mean geodesic error over a data set, degrees. Sequential summation.
template <typename T>
T f_ge(std::span<const RotationMatrix<T>> estimates, std::span<const RotationMatrix<T>> truths) {
  metrics_detail::require_pairs(estimates.size(), truths.size());
  T sum = T(0);
  for (std::size_t i = 0; i < estimates.size(); ++i) sum += g_geodesic(estimates[i], truths[i]);
  return sum / static_cast<T>(estimates.size());
}

/// Mean absolute error per Euler angle plus their average.
struct AngleErrors {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
  double mean = 0.0;
};

/// Per-angle MAE over principal decompositions of both matrices. With
/// `wrapped` each difference is taken modulo 360.
inline AngleErrors mean_angle_errors(std::span<const Rotation> estimates,
                                     std::span<const Rotation> truths, bool wrapped) {
  metrics_detail::require_pairs(estimates.size(), truths.size());
  AngleErrors sum;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const EulerAngles e = rotation_to_euler(estimates[i]);
    const EulerAngles t = rotation_to_euler(truths[i]);
    auto diff = [wrapped](double a, double b) {
      return wrapped ? wrapped_diff(a, b) : std::abs(a - b);
    };
    sum.yaw += diff(e.yaw, t.yaw);
    sum.pitch += diff(e.pitch, t.pitch);
    sum.roll += diff(e.roll, t.roll);
  }
  const double n = static_cast<double>(estimates.size());
  AngleErrors out{sum.yaw / n, sum.pitch / n, sum.roll / n, 0.0};
  out.mean = (out.yaw + out.pitch + out.roll) / 3.0;
  return out;
}

}  // namespace headpose

#endif  // HEADPOSE_METRICS_HPP_
