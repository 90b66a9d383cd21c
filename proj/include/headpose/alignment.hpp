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

// Reference-frame alignment between two annotation conventions.
//
// Predictions relate to the ground truth through a per-sample error dR_i and
// a misalignment D shared by the whole set:
//
//   R_hat_i * dR_i * D = R_i
//
// so the residuals delta_i = R_hat_i^T R_i = dR_i D scatter around D. D is
// estimated as their Karcher mean (the minimizer of summed squared geodesic
// distance) and removed by right-multiplying each prediction.

#ifndef HEADPOSE_ALIGNMENT_HPP_
#define HEADPOSE_ALIGNMENT_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "headpose/errors.hpp"
#include "headpose/metrics.hpp"
#include "headpose/so3.hpp"

namespace headpose {

/// Karcher iteration ran out of steps. Carries the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, const Rotation& last_iterate, double last_step_norm)
      : Error(what), last_iterate_(last_iterate), last_step_norm_(last_step_norm) {}

  const Rotation& last_iterate() const { return last_iterate_; }
  double last_step_norm() const { return last_step_norm_; }

 private:
  Rotation last_iterate_;
  double last_step_norm_;
};

struct KarcherOptions {
  double tol = 1e-10;  // radians
  int max_iter = 100;
  /// Maximum pairwise geodesic (degrees) tolerated among the dispersion probe.
  double max_dispersion_deg = 150.0;
  /// Above this the result is flagged but still computed.
  double warn_dispersion_deg = 90.0;
};

struct KarcherResult {
  Rotation mean;
  int iterations = 0;
  double final_step_norm = 0.0;  // radians
  double dispersion_deg = 0.0;
  bool dispersion_warning = false;
  /// Sum of squared geodesic distances (radians^2) at every iterate,
  /// starting with the initial guess.
  std::vector<double> objective;
};

/// delta_i = R_hat_i^T R_i.
inline std::vector<Rotation> residuals(std::span<const Rotation> predictions,
                                       std::span<const Rotation> ground_truth) {
  metrics_detail::require_pairs(predictions.size(), ground_truth.size());
  std::vector<Rotation> out;
  out.reserve(predictions.size());
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    out.push_back(predictions[i].inverse() * ground_truth[i]);
  }
  return out;
}

/// Sum over i of the squared geodesic distance between `m` and rotations[i],
/// radians^2. Accumulated in long double: near convergence successive values
/// differ by less than the rounding of a plain double sum.
inline double karcher_objective(const Rotation& m, std::span<const Rotation> rotations) {
  long double sum = 0.0L;
  for (const Rotation& r : rotations) {
    const long double angle = rotation_angle<double>(m.matrix().transpose() * r.matrix());
    sum += angle * angle;
  }
  return static_cast<double>(sum);
}

namespace alignment_detail {
inline constexpr std::size_t kDispersionProbe = 64;

/// Largest pairwise geodesic (degrees) among an evenly strided subsample.
inline double probe_dispersion(std::span<const Rotation> rotations) {
  const std::size_t n = rotations.size();
  const std::size_t count = std::min(n, kDispersionProbe);
  std::vector<std::size_t> picks(count);
  for (std::size_t k = 0; k < count; ++k) picks[k] = k * n / count;
  double worst = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      worst = std::max(worst, g_geodesic(rotations[picks[i]], rotations[picks[j]]));
    }
  }
  return worst;
}
}  // namespace alignment_detail

/// Karcher mean by tangent-space averaging, starting at rotations[0]:
///
///   r = mean_i log(M^T R_i);  stop if |r| < tol;  M <- M exp(r)
inline KarcherResult karcher_mean(std::span<const Rotation> rotations,
                                  const KarcherOptions& options = {}) {
  if (rotations.empty()) throw EmptyInput("no rotations to average");
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    throw InvalidArgument("Karcher mean needs tol > 0 and max_iter >= 1");
  }
  KarcherResult result;
  result.dispersion_deg = alignment_detail::probe_dispersion(rotations);
  if (result.dispersion_deg > options.max_dispersion_deg) {
    throw IllConditionedInput("rotations too dispersed for a unique mean (max pairwise " +
                              std::to_string(result.dispersion_deg) + " deg)");
  }
  result.dispersion_warning = result.dispersion_deg > options.warn_dispersion_deg;

  Rotation m = rotations[0];
  result.objective.push_back(karcher_objective(m, rotations));
  const double n = static_cast<double>(rotations.size());
  double step_norm = 0.0;
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    Vector3<double> step = Vector3<double>::Zero();
    for (const Rotation& r : rotations) step += log_map(m.inverse() * r).v;
    step /= n;
    step_norm = step.norm();
    result.iterations = iter;
    result.final_step_norm = step_norm;
    if (step_norm < options.tol) {
      result.mean = m;
      return result;
    }
    m = m * exp_map(RotationVector{step});
    // Keep the iterate on SO(3) against drift from repeated products.
    m = Rotation::project(m.matrix());
    result.objective.push_back(karcher_objective(m, rotations));
  }
  throw ConvergenceError("Karcher mean did not converge in " + std::to_string(options.max_iter) +
                             " iterations",
                         m, step_norm);
}

struct AlignmentOptions {
  KarcherOptions karcher;
  /// Apply the estimate as R_hat_i * D^T instead of R_hat_i * D.
  bool transpose_variant = false;
};

struct AlignmentResult {
  Rotation delta_hat;
  int iterations = 0;
  double final_step_norm = 0.0;  // radians
  double ge_before = 0.0;        // degrees
  double ge_after = 0.0;         // degrees
  bool dispersion_warning = false;
};

struct AlignedSet {
  std::vector<Rotation> aligned_predictions;
  AlignmentResult result;
};

/// Applies a fixed alignment to every prediction.
inline std::vector<Rotation> apply_alignment(std::span<const Rotation> predictions,
                                             const Rotation& delta_hat,
                                             bool transpose_variant = false) {
  const Rotation applied = transpose_variant ? delta_hat.inverse() : delta_hat;
  std::vector<Rotation> out;
  out.reserve(predictions.size());
  for (const Rotation& p : predictions) out.push_back(p * applied);
  return out;
}

inline AlignedSet align(std::span<const Rotation> predictions,
                        std::span<const Rotation> ground_truth,
                        const AlignmentOptions& options = {}) {
  const std::vector<Rotation> deltas = residuals(predictions, ground_truth);
  const KarcherResult mean = karcher_mean(deltas, options.karcher);

  AlignedSet out;
  out.aligned_predictions = apply_alignment(predictions, mean.mean, options.transpose_variant);
  out.result.delta_hat = mean.mean;
  out.result.iterations = mean.iterations;
  out.result.final_step_norm = mean.final_step_norm;
  out.result.dispersion_warning = mean.dispersion_warning;
  out.result.ge_before = f_ge<double>(predictions, ground_truth);
  out.result.ge_after = f_ge<double>(out.aligned_predictions, ground_truth);
  return out;
}

}  // namespace headpose

#endif  // HEADPOSE_ALIGNMENT_HPP_
