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

#include "headpose/alignment.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace headpose {
namespace {

using testing::deg;
using testing::rad;

/// Rotations scattered around `center` by small isotropic perturbations.
std::vector<Rotation> cluster(const Rotation& center, double spread_deg, int n,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, rad(spread_deg));
  std::vector<Rotation> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(center * exp_map(RotationVector{Eigen::Vector3d(g(rng), g(rng), g(rng))}));
  }
  return out;
}

TEST(Residuals, DefinitionAndErrors) {
  std::mt19937_64 rng(41);
  const Rotation p = testing::uniform_rotation(rng);
  const Rotation t = testing::uniform_rotation(rng);
  const std::vector<Rotation> ps = {p}, ts = {t};
  const std::vector<Rotation> d = residuals(ps, ts);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_LT((d[0].matrix() - p.matrix().transpose() * t.matrix()).norm(), 1e-14);
  // R_hat * delta = R
  EXPECT_LT(((p * d[0]).matrix() - t.matrix()).norm(), 1e-12);

  const std::vector<Rotation> none;
  EXPECT_THROW(residuals(ps, none), InvalidArgument);
  EXPECT_THROW(residuals(none, none), EmptyInput);
}

TEST(Karcher, IdenticalInputsStopImmediately) {
  const Rotation r = euler_to_rotation(EulerAngles{10, 20, 30});
  const std::vector<Rotation> same(5, r);
  const KarcherResult k = karcher_mean(same);
  EXPECT_EQ(k.iterations, 1);
  EXPECT_LT(g_geodesic(k.mean, r), 1e-6);
  EXPECT_FALSE(k.dispersion_warning);

  const std::vector<Rotation> one = {r};
  EXPECT_LT(g_geodesic(karcher_mean(one).mean, r), 1e-6);
}

TEST(Karcher, TwoPointsMeetAtMidpoint) {
  // Geodesic midpoint of I and exp(v) is exp(v / 2).
  const Eigen::Vector3d v(0.3, -0.2, 0.5);
  const std::vector<Rotation> pair = {Rotation::identity(), exp_map(RotationVector{v})};
  const KarcherResult k = karcher_mean(pair);
  EXPECT_LT(g_geodesic(k.mean, exp_map(RotationVector{v / 2})), 1e-8);
}

TEST(Karcher, RecoversClusterCenter) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Rotation center = testing::uniform_rotation(rng);
    const std::vector<Rotation> xs = cluster(center, 2.0, 1000, rng);
    const KarcherResult k = karcher_mean(xs);
    EXPECT_LT(g_geodesic(k.mean, center), 0.3) << trial;
    // Stationarity: mean tangent vector vanishes at the result.
    Eigen::Vector3d s = Eigen::Vector3d::Zero();
    for (const Rotation& x : xs) s += log_map(k.mean.inverse() * x).v;
    EXPECT_LT((s / 1000.0).norm(), 1e-9);
  }
}

TEST(Karcher, ObjectiveNeverIncreases) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<Rotation> xs = cluster(testing::uniform_rotation(rng), 15.0, 200, rng);
    const KarcherResult k = karcher_mean(xs);
    ASSERT_EQ(k.objective.size(), static_cast<std::size_t>(k.iterations));
    // Once the step falls near 1e-9 rad the true decrease (about N |step|^2)
    // drops below the rounding of the per-sample angles, so allow 1e-13
    // relative slack.
    for (std::size_t i = 1; i < k.objective.size(); ++i) {
      EXPECT_LE(k.objective[i], k.objective[i - 1] * (1 + 1e-13)) << trial << " step " << i;
    }
  }
}

TEST(Karcher, ConvergenceErrorCarriesLastIterate) {
  std::mt19937_64 rng(44);
  const std::vector<Rotation> xs = cluster(Rotation::identity(), 10.0, 50, rng);
  KarcherOptions opts;
  opts.max_iter = 1;
  try {
    karcher_mean(xs, opts);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GT(e.last_step_norm(), opts.tol);
    EXPECT_LT(orthonormality_defect(e.last_iterate().matrix()), 1e-9);
  }
}

TEST(Karcher, RejectsAntipodalSets) {
  const std::vector<Rotation> xs = {
      Rotation::identity(), euler_to_rotation(EulerAngles{0, 0, 179.0}),
      euler_to_rotation(EulerAngles{179.0, 0, 0})};
  EXPECT_THROW(karcher_mean(xs), IllConditionedInput);

  const std::vector<Rotation> wide = {Rotation::identity(),
                                      euler_to_rotation(EulerAngles{0, 120.0, 0})};
  EXPECT_TRUE(karcher_mean(wide).dispersion_warning);

  const std::vector<Rotation> none;
  EXPECT_THROW(karcher_mean(none), EmptyInput);
  KarcherOptions bad;
  bad.tol = 0;
  EXPECT_THROW(karcher_mean(wide, bad), InvalidArgument);
}

// ---------------------------------------------------------------------------
// align()

struct Synthetic {
  std::vector<Rotation> truth, pred;
};

/// R_hat_i = R_i D^T exp(n_i)^T, so R_hat_i exp(n_i) D = R_i.
Synthetic make_set(const Rotation& delta, double noise_deg, int n, std::uint64_t seed) {
  RotationSampler sampler(seed);
  Synthetic s;
  for (int i = 0; i < n; ++i) {
    const Rotation r = sampler.sample_uniform();
    const Rotation e = exp_map(sampler.sample_noise(noise_deg));
    s.truth.push_back(r);
    s.pred.push_back(r * delta.inverse() * e.inverse());
  }
  return s;
}

TEST(Align, ExactMisalignmentIsRemoved) {
  const Rotation delta = euler_to_rotation(EulerAngles{4, -7, 3});
  const Synthetic s = make_set(delta, 0.0, 100, 45);
  const AlignedSet a = align(s.pred, s.truth);
  EXPECT_LT(g_geodesic(a.result.delta_hat, delta), 1e-6);
  EXPECT_LT(a.result.ge_after, 1e-6);
  EXPECT_NEAR(a.result.ge_before, g_geodesic(delta, Rotation::identity()), 1e-6);
}

TEST(Align, RecoversDeltaUnderNoise) {
  const Rotation delta = exp_map(RotationVector{Eigen::Vector3d(1, 2, -1).normalized() * rad(10)});
  const Synthetic s = make_set(delta, 2.0, 1000, 46);
  const Synthetic clean = make_set(Rotation::identity(), 2.0, 1000, 46);
  const AlignedSet a = align(s.pred, s.truth);
  EXPECT_LT(g_geodesic(a.result.delta_hat, delta), 0.3);
  const double noise_only = f_ge<double>(clean.pred, clean.truth);
  EXPECT_NEAR(a.result.ge_after, noise_only, 0.05 * noise_only);
  EXPECT_GT(a.result.ge_before, 9.0);
}

TEST(Align, NoBiasWithoutMisalignment) {
  const Synthetic s = make_set(Rotation::identity(), 2.0, 1000, 47);
  const AlignedSet a = align(s.pred, s.truth);
  EXPECT_LT(std::abs(a.result.ge_after - a.result.ge_before), 0.05);
}

TEST(Align, Equivariance) {
  // Right-multiplying predictions and truths by Q conjugates the residuals,
  // so the estimate becomes Q^T D Q.
  std::mt19937_64 rng(48);
  const Synthetic s = make_set(euler_to_rotation(EulerAngles{5, 5, 5}), 1.0, 200, 49);
  const Rotation q = testing::uniform_rotation(rng);
  std::vector<Rotation> pq, tq;
  for (std::size_t i = 0; i < s.pred.size(); ++i) {
    pq.push_back(s.pred[i] * q);
    tq.push_back(s.truth[i] * q);
  }
  const Rotation d1 = align(s.pred, s.truth).result.delta_hat;
  const Rotation d2 = align(pq, tq).result.delta_hat;
  EXPECT_LT(g_geodesic(d2, q.inverse() * d1 * q), 1e-6);
}

TEST(Align, IdempotentAndDeterministic) {
  const Synthetic s = make_set(euler_to_rotation(EulerAngles{-3, 8, 2}), 2.0, 300, 50);
  const AlignedSet first = align(s.pred, s.truth);
  const AlignedSet again = align(s.pred, s.truth);
  EXPECT_EQ((first.result.delta_hat.matrix() - again.result.delta_hat.matrix()).norm(), 0.0);
  const AlignedSet second = align(first.aligned_predictions, s.truth);
  EXPECT_LT(g_geodesic(second.result.delta_hat, Rotation::identity()), 1e-6);
  EXPECT_NEAR(second.result.ge_after, first.result.ge_after, 1e-6);
}

TEST(Align, TransposeVariantAppliesInverse) {
  const Rotation delta = euler_to_rotation(EulerAngles{0, 6, 0});
  const Synthetic s = make_set(delta, 0.0, 20, 51);
  AlignmentOptions opts;
  opts.transpose_variant = true;
  const AlignedSet a = align(s.pred, s.truth, opts);
  // Applying D^T instead of D leaves a 2 |D| error.
  EXPECT_NEAR(a.result.ge_after, 12.0, 1e-6);
  const std::vector<Rotation> manual = apply_alignment(s.pred, a.result.delta_hat.inverse());
  EXPECT_LT(g_geodesic(manual[0], a.aligned_predictions[0]), 1e-9);
}

}  // namespace
}  // namespace headpose
