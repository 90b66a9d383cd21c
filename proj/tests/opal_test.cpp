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

#include "headpose/opal.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace headpose {
namespace {

using testing::deg;
using testing::rad;

/// Random parameter set with the peak strictly inside (epsilon, beta) and
/// sigma (beta - peak) <= 3.5 so cosh^2 stays moderate.
OpalParams random_params(std::mt19937_64& rng) {
  const double epsilon = testing::uniform(rng, 0.5, 10.0);
  const double beta = epsilon + testing::uniform(rng, 2.0, 40.0);
  const double peak = testing::uniform(rng, epsilon + 0.1 * (beta - epsilon),
                                       beta - 0.1 * (beta - epsilon));
  const double sigma = testing::uniform(rng, 0.05, 3.5 / (beta - peak));
  return derive_constants(epsilon, beta, peak * sigma, sigma);
}

/// Five-point stencil, fourth-order accurate.
double central_difference(double g, const OpalParams& p, double h) {
  return (-g_opal(g + 2 * h, p) + 8 * g_opal(g + h, p) - 8 * g_opal(g - h, p) +
          g_opal(g - 2 * h, p)) /
         (12 * h);
}

TEST(DeriveConstants, DefaultSatisfiesContinuityConditions) {
  const OpalParams p = default_opal_params();
  EXPECT_EQ(p.epsilon(), 2.0);
  EXPECT_EQ(p.beta(), 12.0);
  EXPECT_NEAR(p.peak(), 5.5, 1e-12);
  const OpalResiduals r = p.residuals();
  EXPECT_LT(std::abs(r.value_at_epsilon), 1e-9);
  EXPECT_LT(std::abs(r.value_at_beta), 1e-9);
  EXPECT_LT(std::abs(r.slope_at_epsilon), 1e-9);
  EXPECT_LT(std::abs(r.slope_at_beta), 1e-9);
}

TEST(DeriveConstants, ClosedFormsForDefault) {
  // Frozen from the closed forms evaluated independently:
  // c = cosh^2(0.25 * 12 - 1.375) / 0.25, a = c * 0.25 * sech^2(0.5 - 1.375) / 4, ...
  const OpalParams p = default_opal_params();
  const double c = std::pow(std::cosh(1.625), 2) / 0.25;
  const double a = c * 0.25 / std::pow(std::cosh(-0.875), 2) / 4.0;
  EXPECT_NEAR(p.c(), c, 1e-12);
  EXPECT_NEAR(p.a(), a, 1e-12);
  EXPECT_NEAR(p.b(), c * (std::tanh(-0.875) + std::tanh(1.375)) - 4.0 * a, 1e-12);
  EXPECT_NEAR(p.d(), c * (std::tanh(1.625) + std::tanh(1.375)) - 12.0, 1e-12);
}

TEST(DeriveConstants, RandomParametersSatisfyConditions) {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const OpalParams p = random_params(rng);
    EXPECT_LT(p.residuals().max_abs(), 1e-9) << i;
  }
}

TEST(DeriveConstants, ZeroOffsetAtBetaGivesUnitScale) {
  // sigma beta = mu puts the peak at beta; excluded by the peak constraint,
  // so approach it: c -> 1 / sigma as sigma beta - mu -> 0.
  const double sigma = 0.5;
  const OpalParams p = derive_constants(1.0, 10.0, sigma * (10.0 - 1e-9), sigma);
  EXPECT_NEAR(p.c(), 1.0 / sigma, 1e-12);
  EXPECT_NEAR(opal_influence(10.0, p), 1.0, 0.0);
}

TEST(DeriveConstants, RejectsInvalidOrdering) {
  EXPECT_THROW(derive_constants(5, 2, 1, 0.3), InvalidArgument);
  EXPECT_THROW(derive_constants(0, 2, 0.3, 0.3), InvalidArgument);
  EXPECT_THROW(derive_constants(2, 200, 1, 0.1), InvalidArgument);
  EXPECT_THROW(derive_constants(2, 12, 1, 0), InvalidArgument);
  EXPECT_THROW(derive_constants(2, 12, 0.25, 0.25), InvalidArgument);  // peak 1 < epsilon
  EXPECT_THROW(derive_constants(2, 12, 13 * 0.25, 0.25), InvalidArgument);
}

TEST(GOpal, BranchValues) {
  const OpalParams p = default_opal_params();
  EXPECT_DOUBLE_EQ(g_opal(0.0, p), p.b());
  EXPECT_DOUBLE_EQ(g_opal(1.0, p), p.a() + p.b());
  EXPECT_DOUBLE_EQ(g_opal(20.0, p), 20.0 + p.d());
  for (double g : {12.0, 30.0, 100.0, 179.0}) {
    EXPECT_NEAR(g_opal(g + 1.0, p) - g_opal(g, p), 1.0, 1e-12);
  }
  EXPECT_THROW(g_opal(-1e-9, p), InvalidArgument);
  EXPECT_THROW(opal_influence(-1.0, p), InvalidArgument);
}

TEST(GOpal, MonotoneOnGrid) {
  const OpalParams p = default_opal_params();
  double prev = g_opal(0.0, p);
  for (int k = 1; k <= 180000; ++k) {
    const double v = g_opal(k * 1e-3, p);
    ASSERT_GE(v, prev) << k * 1e-3;
    prev = v;
  }
}

TEST(GOpal, ContinuousAcrossBreakpoints) {
  std::mt19937_64 rng(32);
  std::vector<OpalParams> sets = {default_opal_params()};
  for (int i = 0; i < 50; ++i) sets.push_back(random_params(rng));
  for (const OpalParams& p : sets) {
    for (double edge : {p.epsilon(), p.beta()}) {
      const double left = g_opal(std::nextafter(edge, 0.0), p);
      const double right = g_opal(edge, p);
      EXPECT_LT(std::abs(left - right), 1e-8 * std::max(1.0, std::abs(right)));
      // Gradient limits from each side.
      const double h = 1e-6;
      const double left_slope = (g_opal(edge - h, p) - g_opal(edge - 2 * h, p)) / h;
      const double right_slope = (g_opal(edge + 2 * h, p) - g_opal(edge + h, p)) / h;
      EXPECT_NEAR(left_slope, right_slope, 1e-4 * std::max(1.0, p.peak_influence()));
      EXPECT_NEAR(opal_influence(std::nextafter(edge, 0.0), p), opal_influence(edge, p),
                  1e-8 * std::max(1.0, p.peak_influence()));
    }
  }
}

TEST(Influence, MatchesFiniteDifferences) {
  std::mt19937_64 rng(33);
  std::vector<OpalParams> sets = {default_opal_params()};
  for (int i = 0; i < 20; ++i) sets.push_back(random_params(rng));
  for (const OpalParams& p : sets) {
    for (int k = 0; k <= 400; ++k) {
      const double g = 1e-2 * std::pow(18000.0, k / 400.0);  // 0.01 .. 180
      const double h = 1e-3 * std::min(g, 1.0 / p.sigma());
      if (std::abs(g - p.epsilon()) < 3 * h || std::abs(g - p.beta()) < 3 * h ||
          g + 2 * h > 180) {
        continue;
      }
      const double analytic = opal_influence(g, p);
      const double numeric = central_difference(g, p, h);
      EXPECT_NEAR(numeric, analytic, 1e-6 * std::max(std::abs(analytic), 1.0)) << g;
    }
  }
}

TEST(Influence, ShapeProperties) {
  const OpalParams p = default_opal_params();
  EXPECT_EQ(opal_influence(0.0, p), 0.0);
  EXPECT_DOUBLE_EQ(opal_influence(p.beta(), p), 1.0);
  EXPECT_NEAR(opal_influence(p.peak(), p), std::pow(std::cosh(p.sigma() * p.beta() - p.mu()), 2),
              1e-12);
  EXPECT_GE(p.peak_influence(), 1.0);
  for (int k = 0; k <= 18000; ++k) {
    const double g = k * 0.01;
    const double v = opal_influence(g, p);
    EXPECT_LE(v, p.peak_influence() * (1 + 1e-12));
    if (g >= p.beta()) {
      EXPECT_EQ(v, 1.0);
    }
  }
  // Linear below epsilon.
  EXPECT_NEAR(opal_influence(1.0, p), 0.5 * opal_influence(std::nextafter(2.0, 0.0), p), 1e-9);
}

TEST(Influence, L1LikeTailForFlatShape) {
  // Small sigma flattens sech^2 so the influence stays close to 1 above a
  // tiny epsilon; the loss then tracks G up to a bounded offset.
  const double sigma = 1e-3;
  const OpalParams p = derive_constants(0.01, 179.0, 90.0 * sigma, sigma);
  double lo = 1e300, hi = -1e300;
  for (int k = 1; k <= 1800; ++k) {
    const double g = k * 0.1;
    const double offset = g_opal(g, p) - g;
    lo = std::min(lo, offset);
    hi = std::max(hi, offset);
  }
  EXPECT_LT(hi - lo, 2.0);
}

TEST(FOpal, MeanOverPairs) {
  const OpalParams p = default_opal_params();
  const std::vector<Rotation> same(3, euler_to_rotation(EulerAngles{1, 2, 3}));
  EXPECT_NEAR(f_opal(same, same, p), p.b(), 1e-6);

  const std::vector<Rotation> truth = {Rotation::identity()};
  const std::vector<Rotation> est = {euler_to_rotation(EulerAngles{0, 7, 0})};
  EXPECT_NEAR(f_opal(est, truth, p), g_opal(7.0, p), 1e-10);

  std::mt19937_64 rng(34);
  std::vector<Rotation> xs, ys;
  double brute = 0;
  for (int i = 0; i < 200; ++i) {
    xs.push_back(testing::uniform_rotation(rng));
    ys.push_back(testing::uniform_rotation(rng));
    brute += g_opal(testing::geodesic_arccos_deg(xs.back(), ys.back()), p);
  }
  EXPECT_NEAR(f_opal(xs, ys, p), brute / 200, 1e-6);

  const std::vector<Rotation> none;
  EXPECT_THROW(f_opal(none, none, p), EmptyInput);
}

TEST(FOpal, ChainRuleThroughGeodesic) {
  // f(t) = f_opal({R exp(t n)}, {R}); df/dt = influence(G) * dG/dt with
  // G = t in degrees, so df/dt (per radian) = influence * 180 / pi.
  const OpalParams p = default_opal_params();
  std::mt19937_64 rng(35);
  const Rotation truth = testing::uniform_rotation(rng);
  const Eigen::Vector3d axis = testing::uniform_unit_vector(rng);
  auto loss = [&](double t) {
    const std::vector<Rotation> est = {truth * exp_map(RotationVector{axis * t})};
    const std::vector<Rotation> gt = {truth};
    return f_opal(est, gt, p);
  };
  for (double t_deg : {1.0, 5.0, 20.0}) {
    const double t = rad(t_deg);
    const double h = 1e-6;
    const double numeric = (loss(t + h) - loss(t - h)) / (2 * h);
    const double analytic = opal_influence(t_deg, p) * 180.0 / testing::kPi;
    EXPECT_NEAR(numeric, analytic, 1e-5 * std::abs(analytic)) << t_deg;
  }
}

// ---------------------------------------------------------------------------
// Fitting

TEST(FitParams, ConcentratedSamplesPlacePeak) {
  std::vector<double> samples;
  std::mt19937_64 rng(36);
  std::normal_distribution<double> n(5.5, 0.05);
  for (int i = 0; i < 1000; ++i) samples.push_back(n(rng));
  const OpalParams p = fit_params(samples, 2.0, 12.0);
  EXPECT_NEAR(p.peak(), 5.5, 0.05);
  EXPECT_LT(p.residuals().max_abs(), 1e-9 * std::max(1.0, p.c()));
}

TEST(FitParams, SingleValuedSamples) {
  const std::vector<double> samples(10, 7.3);
  const OpalParams p = fit_params(samples, 2.0, 12.0);
  EXPECT_NEAR(p.peak(), 7.3, 1e-12);
  // One 0.5-degree bin wide.
  EXPECT_NEAR(p.sigma(), 2.0 * std::acosh(std::sqrt(2.0)) / 0.5, 1e-12);
}

TEST(FitParams, BimodalPicksLargerModeThenSmallerError) {
  // Histogram oracle: 30 samples at 4.2 (bin [4.0, 4.5)), 50 at 8.1, then an
  // equal split.
  std::vector<double> samples(30, 4.2);
  samples.insert(samples.end(), 50, 8.1);
  EXPECT_NEAR(fit_params(samples, 2.0, 12.0).peak(), 8.1, 1e-12);

  std::vector<double> tie(40, 4.2);
  tie.insert(tie.end(), 40, 8.1);
  EXPECT_NEAR(fit_params(tie, 2.0, 12.0).peak(), 4.2, 1e-12);
}

TEST(FitParams, WidthFollowsHalfMaximumRun) {
  // Counts per bin 10, 20, 10 around 6.25: all three bins are at or above
  // half the modal count, so the width is 1.5 degrees.
  std::vector<double> samples(10, 5.75);
  samples.insert(samples.end(), 20, 6.25);
  samples.insert(samples.end(), 10, 6.75);
  samples.insert(samples.end(), 4, 7.25);  // below half maximum
  const OpalParams p = fit_params(samples, 2.0, 12.0);
  EXPECT_NEAR(p.peak(), 6.25, 1e-12);
  EXPECT_NEAR(2.0 * std::acosh(std::sqrt(2.0)) / p.sigma(), 1.5, 1e-12);
}

TEST(FitParams, Errors) {
  const std::vector<double> outside = {0.5, 1.0, 15.0, 30.0};
  EXPECT_THROW(fit_params(outside, 2.0, 12.0), FitInfeasible);
  const std::vector<double> none;
  EXPECT_THROW(fit_params(none, 2.0, 12.0), EmptyInput);
  const std::vector<double> some = {5.0};
  EXPECT_THROW(fit_params(some, 12.0, 2.0), InvalidArgument);
}

// ---------------------------------------------------------------------------
// Text form

TEST(OpalText, RoundTrip) {
  const OpalParams p = default_opal_params();
  const OpalParams q = opal_from_text(to_text(p));
  EXPECT_EQ(q.epsilon(), p.epsilon());
  EXPECT_EQ(q.beta(), p.beta());
  EXPECT_EQ(q.mu(), p.mu());
  EXPECT_EQ(q.sigma(), p.sigma());
  EXPECT_EQ(q.a(), p.a());
  EXPECT_EQ(q.d(), p.d());
}

TEST(OpalText, ShapeOnlyIsEnough) {
  const OpalParams q = opal_from_text("# shaped by hand\nepsilon = 2\nbeta=12\nmu = 1.375\nsigma = 0.25\n");
  EXPECT_NEAR(q.c(), default_opal_params().c(), 1e-12);
}

TEST(OpalText, Errors) {
  EXPECT_THROW(opal_from_text("epsilon = 2\nbeta = 12\nmu = 1.375\n"), ParseError);
  EXPECT_THROW(opal_from_text("epsilon = 2\nbeta = 12\nmu = 1.375\nsigma = x\n"), ParseError);
  EXPECT_THROW(opal_from_text("epsilon 2\n"), ParseError);
  EXPECT_THROW(opal_from_text("epsilon = 2\nepsilon = 3\n"), ParseError);
  EXPECT_THROW(opal_from_text("gamma = 2\n"), ParseError);
  EXPECT_THROW(opal_from_text("epsilon = 2\nbeta = 12\nmu = 1.375\nsigma = 0.25\nc = 1\n"),
               ParseError);
}

}  // namespace
}  // namespace headpose
