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

// Evaluation protocol: yaw filtering and binning, metric blocks with optional
// reference-frame alignment, synthetic data sets and report serialization.

#ifndef HEADPOSE_EVAL_HPP_
#define HEADPOSE_EVAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "headpose/alignment.hpp"
#include "headpose/errors.hpp"
#include "headpose/io.hpp"
#include "headpose/metrics.hpp"
#include "headpose/opal.hpp"
#include "headpose/so3.hpp"
#include "headpose/version.hpp"

namespace headpose {

// ---------------------------------------------------------------------------
// Yaw filtering and binning. Both read the ground truth's wide-range Euler
// decomposition (|pitch| <= 90, yaw in [-180, 180)), so a head turned past
// profile reports |yaw| > 90.

inline EulerAngles ground_truth_angles(const SampleRecord& s) {
  return rotation_to_euler_wide(s.ground_truth);
}

struct FilterResult {
  std::vector<SampleRecord> kept;
  std::size_t dropped = 0;
};

/// Keeps samples whose yaw (or, with `tri_angle`, all three angles) lies in
/// [min_deg, max_deg].
inline FilterResult filter_by_yaw(std::span<const SampleRecord> samples, double min_deg,
                                  double max_deg, bool tri_angle = false) {
  if (!(min_deg <= max_deg)) throw InvalidArgument("yaw filter needs MIN <= MAX");
  auto inside = [&](double a) { return a >= min_deg && a <= max_deg; };
  FilterResult out;
  for (const SampleRecord& s : samples) {
    const EulerAngles e = ground_truth_angles(s);
    const bool keep = tri_angle ? inside(e.yaw) && inside(e.pitch) && inside(e.roll)
                                : inside(e.yaw);
    if (keep) {
      out.kept.push_back(s);
    } else {
      ++out.dropped;
    }
  }
  return out;
}

struct YawBin {
  std::string name;
  double lo = 0.0;  // |yaw|, degrees
  double hi = 0.0;
};

/// Named |yaw| intervals, ordered by lower bound. A value on a shared edge
/// belongs to the lower interval.
struct BinSpec {
  std::vector<YawBin> bins;

  static BinSpec make(std::vector<YawBin> bins) {
    if (bins.empty()) throw InvalidArgument("bin spec needs at least one bin");
    std::sort(bins.begin(), bins.end(),
              [](const YawBin& a, const YawBin& b) { return a.lo < b.lo; });
    for (std::size_t i = 0; i < bins.size(); ++i) {
      const YawBin& b = bins[i];
      if (b.name.empty()) throw InvalidArgument("bin names must be non-empty");
      if (!(b.lo >= 0.0 && b.lo < b.hi && b.hi <= 180.0)) {
        throw InvalidArgument("bin '" + b.name + "' must satisfy 0 <= lo < hi <= 180");
      }
      if (i > 0 && b.lo < bins[i - 1].hi) {
        throw InvalidArgument("bins '" + bins[i - 1].name + "' and '" + b.name + "' overlap");
      }
      for (std::size_t j = 0; j < i; ++j) {
        if (bins[j].name == b.name) throw InvalidArgument("duplicate bin name '" + b.name + "'");
      }
    }
    return BinSpec{std::move(bins)};
  }

  /// Index of the bin holding |yaw|, or nullopt.
  std::optional<std::size_t> find(double abs_yaw) const {
    for (std::size_t i = 0; i < bins.size(); ++i) {
      if (abs_yaw >= bins[i].lo && abs_yaw <= bins[i].hi) return i;
    }
    return std::nullopt;
  }
};

inline BinSpec default_bins() {
  return BinSpec::make({{"frontal", 0.0, 60.0}, {"profile", 60.0, 120.0}, {"back", 120.0, 180.0}});
}

/// Parses `name:lo:hi[,name:lo:hi...]`.
inline BinSpec parse_bins(const std::string& text) {
  std::vector<YawBin> bins;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find(':');
    const auto second = item.find(':', first == std::string::npos ? first : first + 1);
    if (first == std::string::npos || second == std::string::npos) {
      throw InvalidArgument("bin '" + item + "' is not name:lo:hi");
    }
    YawBin b;
    b.name = item.substr(0, first);
    try {
      std::size_t used_lo = 0, used_hi = 0;
      const std::string lo = item.substr(first + 1, second - first - 1);
      const std::string hi = item.substr(second + 1);
      b.lo = std::stod(lo, &used_lo);
      b.hi = std::stod(hi, &used_hi);
      if (used_lo != lo.size() || used_hi != hi.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidArgument("bin '" + item + "' has non-numeric bounds");
    }
    bins.push_back(std::move(b));
  }
  return BinSpec::make(std::move(bins));
}

struct BinnedSamples {
  std::vector<std::pair<YawBin, std::vector<SampleRecord>>> bins;
  std::size_t unbinned = 0;
};

inline BinnedSamples bin_by_yaw(std::span<const SampleRecord> samples, const BinSpec& spec) {
  BinnedSamples out;
  for (const YawBin& b : spec.bins) out.bins.push_back({b, {}});
  for (const SampleRecord& s : samples) {
    if (auto k = spec.find(std::abs(ground_truth_angles(s).yaw))) {
      out.bins[*k].second.push_back(s);
    } else {
      ++out.unbinned;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metric blocks.

/// Samples whose principal yaw (truth or prediction) is within this many
/// degrees of +-90 have unreliable per-angle errors.
inline constexpr double kGimbalFlagDeg = 1.0;

struct MetricBlock {
  std::size_t count = 0;
  double ge = 0.0;
  AngleErrors mae_raw;
  AngleErrors mae_wrapped;
  double euc = 0.0;
  double chordal = 0.0;
  std::optional<double> opal;
  std::size_t gimbal_flagged = 0;
};

/// Metrics over paired rotations; nullopt for an empty set.
inline std::optional<MetricBlock> compute_block(std::span<const Rotation> predictions,
                                                std::span<const Rotation> truths,
                                                const std::optional<OpalParams>& opal) {
  if (predictions.size() != truths.size()) {
    throw InvalidArgument("prediction and truth counts differ");
  }
  if (predictions.empty()) return std::nullopt;
  MetricBlock b;
  b.count = predictions.size();
  b.ge = f_ge<double>(predictions, truths);
  b.mae_raw = mean_angle_errors(predictions, truths, false);
  b.mae_wrapped = mean_angle_errors(predictions, truths, true);
  double euc = 0.0, chordal = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const EulerAngles p = rotation_to_euler(predictions[i]);
    const EulerAngles t = rotation_to_euler(truths[i]);
    euc += g_euc(p, t);
    chordal += g_chordal(predictions[i], truths[i]);
    if (std::abs(std::abs(p.yaw) - 90.0) <= kGimbalFlagDeg ||
        std::abs(std::abs(t.yaw) - 90.0) <= kGimbalFlagDeg) {
      ++b.gimbal_flagged;
    }
  }
  const double n = static_cast<double>(b.count);
  b.euc = euc / n;
  b.chordal = chordal / n;
  if (opal) b.opal = f_opal(predictions, truths, *opal);
  return b;
}

struct BinBlock {
  YawBin bin;
  std::optional<MetricBlock> metrics;
};

/// Overall and per-bin metrics of one set of predictions.
struct MetricTable {
  std::optional<MetricBlock> overall;
  std::vector<BinBlock> bins;
  std::size_t unbinned = 0;
};

struct GroupAlignment {
  std::string group;  // empty for a global alignment
  Rotation delta_hat;
  EulerAngles delta_euler;
  double delta_angle_deg = 0.0;
  double ge_before = 0.0;
  double ge_after = 0.0;
  int iterations = 0;
  bool dispersion_warning = false;
};

struct AlignmentBlock {
  std::vector<GroupAlignment> groups;
  MetricTable metrics;
};

struct Provenance {
  std::string tool_version = kVersion;
  std::vector<std::pair<std::string, std::string>> inputs;      // name -> sha256
  std::vector<std::pair<std::string, std::string>> parameters;  // ordered
};

struct EvalReport {
  MetricTable unaligned;
  std::optional<AlignmentBlock> aligned;
  std::optional<std::string> alignment_error;
  std::optional<OpalParams> opal;
  Provenance provenance;
};

struct EvalOptions {
  bool align = false;
  bool group_align = false;
  bool transpose_variant = false;
  BinSpec bins = default_bins();
  std::optional<OpalParams> opal;
  KarcherOptions karcher;
};

namespace eval_detail {

inline MetricTable metric_table(std::span<const SampleRecord> samples,
                                std::span<const Rotation> predictions, const BinSpec& spec,
                                const std::optional<OpalParams>& opal) {
  std::vector<Rotation> truths;
  truths.reserve(samples.size());
  for (const SampleRecord& s : samples) truths.push_back(s.ground_truth);

  MetricTable table;
  table.overall = compute_block(predictions, truths, opal);
  std::vector<std::vector<Rotation>> bin_pred(spec.bins.size()), bin_truth(spec.bins.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (auto k = spec.find(std::abs(ground_truth_angles(samples[i]).yaw))) {
      bin_pred[*k].push_back(predictions[i]);
      bin_truth[*k].push_back(truths[i]);
    } else {
      ++table.unbinned;
    }
  }
  for (std::size_t k = 0; k < spec.bins.size(); ++k) {
    table.bins.push_back({spec.bins[k], compute_block(bin_pred[k], bin_truth[k], opal)});
  }
  return table;
}

inline GroupAlignment align_group(const std::string& name, std::span<const Rotation> predictions,
                                  std::span<const Rotation> truths, const EvalOptions& options,
                                  std::vector<Rotation>& aligned_out) {
  AlignmentOptions ao;
  ao.karcher = options.karcher;
  ao.transpose_variant = options.transpose_variant;
  AlignedSet set = align(predictions, truths, ao);
  aligned_out = std::move(set.aligned_predictions);
  GroupAlignment g;
  g.group = name;
  g.delta_hat = set.result.delta_hat;
  g.delta_euler = rotation_to_euler(set.result.delta_hat);
  g.delta_angle_deg = g_geodesic(set.result.delta_hat, Rotation::identity());
  g.ge_before = set.result.ge_before;
  g.ge_after = set.result.ge_after;
  g.iterations = set.result.iterations;
  g.dispersion_warning = set.result.dispersion_warning;
  return g;
}

}  // namespace eval_detail

/// Runs every metric overall and per bin. With `align`, one alignment is
/// estimated globally (or per group) and an aligned block is added; if the
/// alignment fails the report keeps the unaligned block and records the error.
inline EvalReport evaluate(std::span<const SampleRecord> samples, const EvalOptions& options) {
  if (samples.empty()) throw EmptyInput("no samples to evaluate");
  std::vector<Rotation> predictions;
  std::vector<Rotation> truths;
  predictions.reserve(samples.size());
  truths.reserve(samples.size());
  for (const SampleRecord& s : samples) {
    if (!s.prediction) throw InvalidArgument("sample '" + s.id + "' has no prediction");
    predictions.push_back(*s.prediction);
    truths.push_back(s.ground_truth);
  }

  EvalReport report;
  report.opal = options.opal;
  report.unaligned = eval_detail::metric_table(samples, predictions, options.bins, options.opal);
  if (!options.align) return report;

  try {
    AlignmentBlock block;
    std::vector<Rotation> aligned(samples.size());
    if (!options.group_align) {
      block.groups.push_back(
          eval_detail::align_group("", predictions, truths, options, aligned));
    } else {
      // Groups in order of first appearance; ungrouped samples share "".
      std::vector<std::string> order;
      std::map<std::string, std::vector<std::size_t>> members;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const std::string key = samples[i].group.value_or("");
        if (!members.count(key)) order.push_back(key);
        members[key].push_back(i);
      }
      for (const std::string& key : order) {
        const std::vector<std::size_t>& idx = members[key];
        std::vector<Rotation> gp, gt, ga;
        for (std::size_t i : idx) {
          gp.push_back(predictions[i]);
          gt.push_back(truths[i]);
        }
        block.groups.push_back(eval_detail::align_group(key, gp, gt, options, ga));
        for (std::size_t k = 0; k < idx.size(); ++k) aligned[idx[k]] = ga[k];
      }
    }
    block.metrics = eval_detail::metric_table(samples, aligned, options.bins, options.opal);
    report.aligned = std::move(block);
  } catch (const ConvergenceError& e) {
    report.alignment_error = e.what();
  } catch (const IllConditionedInput& e) {
    report.alignment_error = e.what();
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization. Numbers carry 6 significant digits; keys keep a fixed
// order so equal reports serialize to equal bytes.

using ordered_json = nlohmann::ordered_json;

inline double round_sig6(double v) {
  if (!std::isfinite(v)) return v;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  double r = std::strtod(buf, nullptr);
  return r == 0.0 ? 0.0 : r;  // no "-0"
}

namespace eval_detail {

inline ordered_json angle_errors_json(const AngleErrors& e) {
  ordered_json j;
  j["yaw"] = round_sig6(e.yaw);
  j["pitch"] = round_sig6(e.pitch);
  j["roll"] = round_sig6(e.roll);
  j["mean"] = round_sig6(e.mean);
  return j;
}

inline ordered_json block_json(const std::optional<MetricBlock>& b) {
  ordered_json j;
  if (!b) {
    j["count"] = 0;
    return j;
  }
  j["count"] = b->count;
  j["ge"] = round_sig6(b->ge);
  j["mae_raw"] = angle_errors_json(b->mae_raw);
  j["mae_wrapped"] = angle_errors_json(b->mae_wrapped);
  j["euc"] = round_sig6(b->euc);
  j["chordal"] = round_sig6(b->chordal);
  if (b->opal) j["opal"] = round_sig6(*b->opal);
  j["gimbal_flagged"] = b->gimbal_flagged;
  return j;
}

inline ordered_json table_json(const MetricTable& t) {
  ordered_json j;
  j["overall"] = block_json(t.overall);
  ordered_json bins = ordered_json::array();
  for (const BinBlock& b : t.bins) {
    ordered_json e;
    e["name"] = b.bin.name;
    e["abs_yaw_lo"] = round_sig6(b.bin.lo);
    e["abs_yaw_hi"] = round_sig6(b.bin.hi);
    e["metrics"] = block_json(b.metrics);
    bins.push_back(std::move(e));
  }
  j["bins"] = std::move(bins);
  j["unbinned"] = t.unbinned;
  return j;
}

inline ordered_json rotation_json(const Rotation& r) {
  ordered_json rows = ordered_json::array();
  for (int i = 0; i < 3; ++i) {
    rows.push_back({round_sig6(r(i, 0)), round_sig6(r(i, 1)), round_sig6(r(i, 2))});
  }
  return rows;
}

}  // namespace eval_detail

inline ordered_json opal_json(const OpalParams& p) {
  ordered_json j;
  j["epsilon"] = round_sig6(p.epsilon());
  j["beta"] = round_sig6(p.beta());
  j["mu"] = round_sig6(p.mu());
  j["sigma"] = round_sig6(p.sigma());
  j["a"] = round_sig6(p.a());
  j["b"] = round_sig6(p.b());
  j["c"] = round_sig6(p.c());
  j["d"] = round_sig6(p.d());
  return j;
}

inline ordered_json report_to_json(const EvalReport& report) {
  using namespace eval_detail;
  ordered_json j;
  j["unaligned"] = table_json(report.unaligned);
  if (report.aligned) {
    ordered_json a;
    ordered_json groups = ordered_json::array();
    for (const GroupAlignment& g : report.aligned->groups) {
      ordered_json e;
      e["group"] = g.group;
      e["delta_hat"] = rotation_json(g.delta_hat);
      e["delta_euler"] = {{"pitch", round_sig6(g.delta_euler.pitch)},
                          {"yaw", round_sig6(g.delta_euler.yaw)},
                          {"roll", round_sig6(g.delta_euler.roll)}};
      e["delta_angle"] = round_sig6(g.delta_angle_deg);
      e["ge_before"] = round_sig6(g.ge_before);
      e["ge_after"] = round_sig6(g.ge_after);
      e["iterations"] = g.iterations;
      e["dispersion_warning"] = g.dispersion_warning;
      groups.push_back(std::move(e));
    }
    a["groups"] = std::move(groups);
    a["metrics"] = table_json(report.aligned->metrics);
    j["aligned"] = std::move(a);
  }
  if (report.alignment_error) j["alignment_error"] = *report.alignment_error;
  if (report.opal) j["opal_params"] = opal_json(*report.opal);
  ordered_json prov;
  prov["tool_version"] = report.provenance.tool_version;
  ordered_json inputs = ordered_json::object();
  for (const auto& [name, digest] : report.provenance.inputs) inputs[name] = digest;
  prov["inputs_sha256"] = std::move(inputs);
  ordered_json params = ordered_json::object();
  for (const auto& [name, value] : report.provenance.parameters) params[name] = value;
  prov["parameters"] = std::move(params);
  j["provenance"] = std::move(prov);
  return j;
}

namespace eval_detail {

inline std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", round_sig6(v));
  return buf;
}

inline void csv_row(std::ostringstream& out, const std::string& block, const std::string& bin,
                    const std::optional<MetricBlock>& m) {
  out << block << ',' << bin << ',' << (m ? m->count : 0);
  if (!m) {
    out << std::string(13, ',') << '\n';
    return;
  }
  const AngleErrors& r = m->mae_raw;
  const AngleErrors& w = m->mae_wrapped;
  for (double v : {m->ge, r.yaw, r.pitch, r.roll, r.mean, w.yaw, w.pitch, w.roll, w.mean, m->euc,
                   m->chordal}) {
    out << ',' << csv_number(v);
  }
  out << ',' << (m->opal ? csv_number(*m->opal) : "") << ',' << m->gimbal_flagged << '\n';
}

inline void csv_table(std::ostringstream& out, const std::string& block, const MetricTable& t) {
  for (const BinBlock& b : t.bins) csv_row(out, block, b.bin.name, b.metrics);
  csv_row(out, block, "overall", t.overall);
}

}  // namespace eval_detail

inline constexpr const char* kCsvSummaryHeader =
    "block,bin,count,ge,mae_yaw,mae_pitch,mae_roll,mae_mean,wmae_yaw,wmae_pitch,wmae_roll,"
    "wmae_mean,euc,chordal,opal,gimbal_flagged";

/// One row per bin plus an overall row, for each of the unaligned and (when
/// present) aligned blocks.
inline std::string report_to_csv(const EvalReport& report) {
  std::ostringstream out;
  out << kCsvSummaryHeader << '\n';
  eval_detail::csv_table(out, "unaligned", report.unaligned);
  if (report.aligned) eval_detail::csv_table(out, "aligned", report.aligned->metrics);
  return out.str();
}

enum class ReportFormat { kJson, kCsvSummary };

inline ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::kJson;
  if (name == "csv-summary" || name == "csv") return ReportFormat::kCsvSummary;
  throw InvalidArgument("unknown report format '" + name + "' (json, csv-summary)");
}

inline std::string format_report(const EvalReport& report, ReportFormat format) {
  if (format == ReportFormat::kJson) return report_to_json(report).dump(2) + "\n";
  return report_to_csv(report);
}

inline void write_report(const EvalReport& report, const std::string& path, ReportFormat format) {
  write_text_file(path, format_report(report, format));
}

// ---------------------------------------------------------------------------
// Synthetic data.

struct SynthOptions {
  std::size_t n = 1000;
  DegreeInterval yaw{-180.0, 180.0};
  DegreeInterval pitch{-45.0, 45.0};
  DegreeInterval roll{-45.0, 45.0};
  double noise_deg = 0.0;  // RMS angle of the per-sample error
  std::optional<EulerAngles> misalignment;
  std::uint64_t seed = 0;
  std::size_t groups = 1;  // > 1 assigns samples round-robin to g0, g1, ...
};

struct SynthSet {
  std::vector<PoseRecord> ground_truth;
  std::vector<PoseRecord> predictions;
};

/// Mean angle of the isotropic noise drawn by RotationSampler::sample_noise:
/// a Maxwell distribution with per-axis sigma = rms / sqrt(3).
inline double expected_noise_mean_ge(double rms_deg) {
  return rms_deg * std::sqrt(8.0 / (3.0 * std::numbers::pi));
}

/// Ground truth R_i is drawn from the Euler ranges; the prediction follows
/// R_hat_i dR_i D = R_i with dR_i = exp(n_i), i.e. R_hat_i = R_i D^T dR_i^T.
/// Each sample draws its angles and then its noise, so two sets with the same
/// seed share poses and noise regardless of noise level or misalignment.
inline SynthSet synth_generate(const SynthOptions& options) {
  if (options.n == 0) throw InvalidArgument("synthetic set needs n >= 1");
  if (!(options.noise_deg >= 0.0) || !std::isfinite(options.noise_deg)) {
    throw InvalidArgument("noise must be a finite non-negative angle");
  }
  if (options.groups == 0) throw InvalidArgument("groups must be >= 1");
  const Rotation delta =
      options.misalignment ? euler_to_rotation(*options.misalignment) : Rotation::identity();
  RotationSampler sampler(options.seed);
  SynthSet set;
  set.ground_truth.reserve(options.n);
  set.predictions.reserve(options.n);
  const int width = static_cast<int>(std::to_string(options.n - 1).size());
  for (std::size_t i = 0; i < options.n; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "s%0*zu", width, i);
    std::optional<std::string> group;
    if (options.groups > 1) group = "g" + std::to_string(i % options.groups);
    const Rotation truth = sampler.sample(options.yaw, options.pitch, options.roll);
    const RotationVector noise = sampler.sample_noise(options.noise_deg);
    const Rotation error = exp_map(noise);
    const Rotation prediction = truth * delta.inverse() * error.inverse();
    set.ground_truth.push_back({id, group, truth});
    set.predictions.push_back({id, group, prediction});
  }
  return set;
}

// ---------------------------------------------------------------------------
// Quaternion continuity along a pure-yaw sweep.

struct QuatSweepRow {
  double yaw = 0.0;
  Quaternion q;
};

/// Canonical quaternions of euler_to_rotation(0, yaw, 0), yaw = 0..360.
inline std::vector<QuatSweepRow> quat_sweep(double step_deg) {
  if (!(step_deg > 0.0) || step_deg > 360.0) throw InvalidArgument("sweep step must be in (0, 360]");
  const auto steps = static_cast<std::size_t>(std::floor(360.0 / step_deg + 1e-9));
  std::vector<QuatSweepRow> rows;
  rows.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    const double yaw = static_cast<double>(k) * step_deg;
    rows.push_back({yaw, rotation_to_quat(euler_to_rotation(EulerAngles{0.0, yaw, 0.0}))});
  }
  return rows;
}

/// Midpoints between adjacent rows where some component changes by more than
/// `threshold`.
inline std::vector<double> find_discontinuities(std::span<const QuatSweepRow> rows,
                                                double threshold = 1.0) {
  std::vector<double> out;
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const auto a = rows[k - 1].q.components();
    const auto b = rows[k].q.components();
    double jump = 0.0;
    for (int c = 0; c < 4; ++c) jump = std::max(jump, std::abs(a[c] - b[c]));
    if (jump > threshold) out.push_back((rows[k - 1].yaw + rows[k].yaw) / 2.0);
  }
  return out;
}

inline std::string format_quat_sweep(std::span<const QuatSweepRow> rows) {
  std::ostringstream out;
  out << "yaw,w,x,y,z\n";
  char buf[160];
  for (const QuatSweepRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.6g,%.6g,%.6g,%.6g,%.6g\n", r.yaw, round_sig6(r.q.w),
                  round_sig6(r.q.x), round_sig6(r.q.y), round_sig6(r.q.z));
    out << buf;
  }
  return out.str();
}

}  // namespace headpose

#endif  // HEADPOSE_EVAL_HPP_
