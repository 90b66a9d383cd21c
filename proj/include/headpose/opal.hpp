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

// Opal loss: a piecewise function of the geodesic error G (degrees)
//
//   a G^2 + b                               G < epsilon
//   c (tanh(sigma G - mu) + tanh(mu))       epsilon <= G < beta
//   G + d                                   G >= beta
//
// whose gradient (influence) rises linearly from 0, follows a sech^2 bump
// peaking at G = mu / sigma, and is exactly 1 for large errors. Given
// (epsilon, beta, mu, sigma) the four constants are fixed by value and slope
// continuity at both breakpoints:
//
//   c = cosh^2(sigma beta - mu) / sigma          slope 1 at beta
//   a = c sigma sech^2(sigma epsilon - mu) / (2 epsilon)
//   b = c (tanh(sigma epsilon - mu) + tanh mu) - a epsilon^2
//   d = c (tanh(sigma beta - mu) + tanh mu) - beta
//
// sigma is per degree, so mu is unitless and the peak mu / sigma is in degrees.

#ifndef HEADPOSE_OPAL_HPP_
#define HEADPOSE_OPAL_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "headpose/errors.hpp"
#include "headpose/metrics.hpp"
#include "headpose/so3.hpp"

namespace headpose {

namespace opal_detail {
inline double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}
}  // namespace opal_detail

/// Residuals of the continuity / differentiability conditions at epsilon and
/// beta. All four are zero for a consistent parameter set.
struct OpalResiduals {
  double value_at_epsilon = 0.0;
  double value_at_beta = 0.0;
  double slope_at_epsilon = 0.0;
  double slope_at_beta = 0.0;

  double max_abs() const {
    return std::max({std::abs(value_at_epsilon), std::abs(value_at_beta),
                     std::abs(slope_at_epsilon), std::abs(slope_at_beta)});
  }
};

/// Immutable Opal parameter set. Only derive_constants() builds one.
class OpalParams {
 public:
  double epsilon() const { return epsilon_; }
  double beta() const { return beta_; }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double d() const { return d_; }

  /// Error at which the influence peaks, degrees.
  double peak() const { return mu_ / sigma_; }
  /// Influence at the peak, cosh^2(sigma beta - mu).
  double peak_influence() const { return c_ * sigma_; }

  OpalResiduals residuals() const {
    using opal_detail::sech2;
    OpalResiduals r;
    r.value_at_epsilon =
        a_ * epsilon_ * epsilon_ + b_ - c_ * (std::tanh(sigma_ * epsilon_ - mu_) + std::tanh(mu_));
    r.value_at_beta = c_ * (std::tanh(sigma_ * beta_ - mu_) + std::tanh(mu_)) - (beta_ + d_);
    r.slope_at_epsilon = 2.0 * a_ * epsilon_ - c_ * sigma_ * sech2(sigma_ * epsilon_ - mu_);
    r.slope_at_beta = c_ * sigma_ * sech2(sigma_ * beta_ - mu_) - 1.0;
    return r;
  }

  friend OpalParams derive_constants(double epsilon, double beta, double mu, double sigma);

 private:
  OpalParams() = default;

  double epsilon_ = 0.0;
  double beta_ = 0.0;
  double mu_ = 0.0;
  double sigma_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
  double c_ = 0.0;
  double d_ = 0.0;
};

inline OpalParams derive_constants(double epsilon, double beta, double mu, double sigma) {
  for (double v : {epsilon, beta, mu, sigma}) {
    if (!std::isfinite(v)) throw InvalidArgument("Opal parameters must be finite");
  }
  if (!(epsilon > 0.0 && epsilon < beta && beta <= 180.0)) {
    throw InvalidArgument("Opal thresholds must satisfy 0 < epsilon < beta <= 180");
  }
  if (!(sigma > 0.0)) throw InvalidArgument("Opal sigma must be positive");
  const double peak = mu / sigma;
  if (!(peak > epsilon && peak < beta)) {
    throw InvalidArgument("Opal influence peak mu/sigma must lie in (epsilon, beta)");
  }
  const double cosh_beta = std::cosh(sigma * beta - mu);
  const double cosh2_beta = cosh_beta * cosh_beta;
  if (!std::isfinite(cosh2_beta)) {
    throw InvalidArgument("Opal sigma*beta - mu too large; sech^2 underflows at beta");
  }

  OpalParams p;
  p.epsilon_ = epsilon;
  p.beta_ = beta;
  p.mu_ = mu;
  p.sigma_ = sigma;
  p.c_ = cosh2_beta / sigma;
  p.a_ = p.c_ * sigma * opal_detail::sech2(sigma * epsilon - mu) / (2.0 * epsilon);
  p.b_ = p.c_ * (std::tanh(sigma * epsilon - mu) + std::tanh(mu)) - p.a_ * epsilon * epsilon;
  p.d_ = p.c_ * (std::tanh(sigma * beta - mu) + std::tanh(mu)) - beta;
  return p;
}

/// Thresholds 2 and 12 degrees with the influence peak at 5.5 degrees.
inline OpalParams default_opal_params() {
  constexpr double kSigma = 0.25;
  return derive_constants(2.0, 12.0, 5.5 * kSigma, kSigma);
}

inline double g_opal(double geodesic_deg, const OpalParams& p) {
  if (!(geodesic_deg >= 0.0)) {
    throw InvalidArgument("Opal loss needs a non-negative geodesic error");
  }
  const double g = geodesic_deg;
  if (g < p.epsilon()) return p.a() * g * g + p.b();
  if (g < p.beta()) return p.c() * (std::tanh(p.sigma() * g - p.mu()) + std::tanh(p.mu()));
  return g + p.d();
}

/// d g_opal / dG.
inline double opal_influence(double geodesic_deg, const OpalParams& p) {
  if (!(geodesic_deg >= 0.0)) {
    throw InvalidArgument("Opal influence needs a non-negative geodesic error");
  }
  const double g = geodesic_deg;
  if (g < p.epsilon()) return 2.0 * p.a() * g;
  if (g < p.beta()) return p.c() * p.sigma() * opal_detail::sech2(p.sigma() * g - p.mu());
  return 1.0;
}

/// Mean Opal loss over a set of (estimate, truth) pairs.
inline double f_opal(std::span<const Rotation> estimates, std::span<const Rotation> truths,
                     const OpalParams& p) {
  metrics_detail::require_pairs(estimates.size(), truths.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    sum += g_opal(g_geodesic(estimates[i], truths[i]), p);
  }
  return sum / static_cast<double>(estimates.size());
}

inline constexpr double kOpalFitBinWidth = 0.5;

/// Places the influence peak on the dominant error range of `samples`.
///
/// Samples inside (epsilon, beta) are binned at 0.5 degree resolution. The
/// peak is the mean of the samples in the fullest bin (ties go to the smaller
/// error) and sigma is chosen so the sech^2 full width at half maximum,
/// 2 acosh(sqrt 2) / sigma, equals the width of the contiguous run of bins
/// holding at least half the modal count.
inline OpalParams fit_params(std::span<const double> samples, double epsilon, double beta) {
  if (samples.empty()) throw EmptyInput("no error samples to fit");
  if (!(epsilon > 0.0 && epsilon < beta && beta <= 180.0)) {
    throw InvalidArgument("Opal thresholds must satisfy 0 < epsilon < beta <= 180");
  }
  const auto bin_count = static_cast<std::size_t>(std::ceil(beta / kOpalFitBinWidth)) + 1;
  std::vector<std::size_t> counts(bin_count, 0);
  std::vector<double> sums(bin_count, 0.0);
  std::size_t inside = 0;
  for (double g : samples) {
    if (!std::isfinite(g)) throw InvalidArgument("error samples must be finite");
    if (!(g > epsilon && g < beta)) continue;
    const auto k = static_cast<std::size_t>(std::floor(g / kOpalFitBinWidth));
    ++counts[k];
    sums[k] += g;
    ++inside;
  }
  if (inside == 0) {
    throw FitInfeasible("no error samples inside (epsilon, beta)");
  }
  std::size_t mode = 0;
  for (std::size_t k = 1; k < bin_count; ++k) {
    if (counts[k] > counts[mode]) mode = k;
  }
  const double peak = sums[mode] / static_cast<double>(counts[mode]);

  std::size_t left = mode, right = mode;
  while (left > 0 && 2 * counts[left - 1] >= counts[mode]) --left;
  while (right + 1 < bin_count && 2 * counts[right + 1] >= counts[mode]) ++right;
  const double fwhm = static_cast<double>(right - left + 1) * kOpalFitBinWidth;

  const double sigma = 2.0 * std::acosh(std::sqrt(2.0)) / fwhm;
  return derive_constants(epsilon, beta, peak * sigma, sigma);
}

// ---------------------------------------------------------------------------
// Flat key = value text form.

inline std::string to_text(const OpalParams& p) {
  std::ostringstream out;
  const std::array<std::pair<const char*, double>, 8> fields = {{
      {"epsilon", p.epsilon()}, {"beta", p.beta()}, {"mu", p.mu()}, {"sigma", p.sigma()},
      {"a", p.a()}, {"b", p.b()}, {"c", p.c()}, {"d", p.d()},
  }};
  char buf[64];
  for (const auto& [key, value] : fields) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << key << " = " << buf << '\n';
  }
  return out.str();
}

/// Parses the text form. epsilon, beta, mu and sigma are required; a, b, c
/// and d are re-derived and, when present, must agree with the derivation.
inline OpalParams opal_from_text(const std::string& text) {
  std::map<std::string, double> values;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string raw = trim(line.substr(eq + 1));
    static const std::array<const char*, 8> known = {"epsilon", "beta", "mu", "sigma",
                                                     "a",       "b",    "c",  "d"};
    if (std::find_if(known.begin(), known.end(), [&](const char* k) { return key == k; }) ==
        known.end()) {
      throw ParseError(line_no, "unknown key '" + key + "'");
    }
    if (values.count(key)) throw ParseError(line_no, "duplicate key '" + key + "'");
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(raw, &used);
    } catch (const std::exception&) {
      throw ParseError(line_no, "value of '" + key + "' is not a number");
    }
    if (used != raw.size() || !std::isfinite(v)) {
      throw ParseError(line_no, "value of '" + key + "' is not a finite number");
    }
    values[key] = v;
  }
  for (const char* key : {"epsilon", "beta", "mu", "sigma"}) {
    if (!values.count(key)) throw ParseError(0, std::string("missing key '") + key + "'");
  }
  const OpalParams p =
      derive_constants(values["epsilon"], values["beta"], values["mu"], values["sigma"]);
  const std::array<std::pair<const char*, double>, 4> derived = {
      {{"a", p.a()}, {"b", p.b()}, {"c", p.c()}, {"d", p.d()}}};
  for (const auto& [key, value] : derived) {
    auto it = values.find(key);
    if (it == values.end()) continue;
    if (std::abs(it->second - value) > 1e-9 * std::max(1.0, std::abs(value))) {
      throw ParseError(0, std::string("constant '") + key +
                              "' is inconsistent with epsilon, beta, mu and sigma");
    }
  }
  return p;
}

}  // namespace headpose

#endif  // HEADPOSE_OPAL_HPP_
