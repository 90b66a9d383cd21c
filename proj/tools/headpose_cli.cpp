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

// headpose: convert, evaluate and align head-pose files; generate synthetic
// sets; derive or fit Opal parameters; print the quaternion yaw sweep.
//
// Exit codes: 0 success, 1 input error, 2 convergence error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "headpose/headpose.hpp"

namespace {

using namespace headpose;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitConvergence = 2;

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

FileFormat resolve_format(const std::string& flag, const std::string& path) {
  if (!flag.empty()) return parse_file_format(flag);
  return ends_with(path, ".jsonl") ? FileFormat::kJsonl : FileFormat::kCsv;
}

double parse_double(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw InvalidArgument(what + ": '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw InvalidArgument(what + ": '" + text + "' is not a finite number");
  }
  return v;
}

/// "MIN:MAX"
DegreeInterval parse_range(const std::string& text, const std::string& what) {
  const auto colon = text.find(':', text.empty() ? 0 : 1);
  if (colon == std::string::npos) throw InvalidArgument(what + " must be MIN:MAX");
  DegreeInterval r{parse_double(text.substr(0, colon), what),
                   parse_double(text.substr(colon + 1), what)};
  if (!(r.lo <= r.hi)) throw InvalidArgument(what + " needs MIN <= MAX");
  return r;
}

/// "P,Y,R"
EulerAngles parse_euler(const std::string& text, const std::string& what) {
  std::vector<double> v;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) v.push_back(parse_double(item, what));
  if (v.size() != 3) throw InvalidArgument(what + " must be PITCH,YAW,ROLL");
  return {v[0], v[1], v[2]};
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(path, text);
  }
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", round_sig6(v));
  return buf;
}

// ---------------------------------------------------------------------------

struct ConvertArgs {
  std::string in, out = "-", in_rep, out_rep, in_format, out_format;
};

int run_convert(const ConvertArgs& a) {
  const auto records =
      load_poses(a.in, resolve_format(a.in_format, a.in), parse_representation(a.in_rep));
  emit(a.out, format_poses(records, resolve_format(a.out_format, a.out),
                           parse_representation(a.out_rep.empty() ? a.in_rep : a.out_rep)));
  return kExitOk;
}

struct PairArgs {
  std::string gt, pred, rep, pred_rep, gt_format, pred_format;
};

std::vector<SampleRecord> load_pairs(const PairArgs& a) {
  const Representation gt_rep = parse_representation(a.rep);
  const Representation pred_rep = a.pred_rep.empty() ? gt_rep : parse_representation(a.pred_rep);
  const auto gt = load_poses(a.gt, resolve_format(a.gt_format, a.gt), gt_rep);
  const auto pred = load_poses(a.pred, resolve_format(a.pred_format, a.pred), pred_rep);
  return pair_samples(gt, pred);
}

struct EvaluateArgs {
  PairArgs files;
  bool align = false, group_align = false, transpose = false, tri_angle = false;
  std::string bins, yaw_filter, opal, out = "-", format = "json";
  double tol = 1e-10;
  int max_iter = 100;
};

int run_evaluate(const EvaluateArgs& a) {
  std::vector<SampleRecord> samples = load_pairs(a.files);
  EvalOptions options;
  options.align = a.align || a.group_align;
  options.group_align = a.group_align;
  options.transpose_variant = a.transpose;
  options.karcher.tol = a.tol;
  options.karcher.max_iter = a.max_iter;
  if (!a.bins.empty()) options.bins = parse_bins(a.bins);
  if (!a.opal.empty()) options.opal = opal_from_text(read_text(a.opal));

  std::size_t dropped = 0;
  if (!a.yaw_filter.empty()) {
    const DegreeInterval range = parse_range(a.yaw_filter, "--yaw-filter");
    FilterResult f = filter_by_yaw(samples, range.lo, range.hi, a.tri_angle);
    dropped = f.dropped;
    samples = std::move(f.kept);
  }
  const ReportFormat format = parse_report_format(a.format);

  EvalReport report = evaluate(samples, options);
  report.provenance.inputs = {{"gt", file_digest(a.files.gt)}, {"pred", file_digest(a.files.pred)}};
  if (!a.opal.empty()) report.provenance.inputs.push_back({"opal", file_digest(a.opal)});
  auto& params = report.provenance.parameters;
  params.push_back({"rep", a.files.rep});
  params.push_back({"pred_rep", a.files.pred_rep.empty() ? a.files.rep : a.files.pred_rep});
  params.push_back({"align", options.align ? "global" : "off"});
  if (options.group_align) params.back().second = "group";
  params.push_back({"transpose_alignment", a.transpose ? "true" : "false"});
  std::string bins;
  for (const YawBin& b : options.bins.bins) {
    if (!bins.empty()) bins += ',';
    bins += b.name + ":" + fmt6(b.lo) + ":" + fmt6(b.hi);
  }
  params.push_back({"bins", bins});
  params.push_back({"yaw_filter", a.yaw_filter.empty() ? "none" : a.yaw_filter});
  params.push_back({"tri_angle_filter", a.tri_angle ? "true" : "false"});
  params.push_back({"filtered_out", std::to_string(dropped)});
  params.push_back({"karcher_tol", fmt6(a.tol)});
  params.push_back({"karcher_max_iter", std::to_string(a.max_iter)});

  emit(a.out, format_report(report, format));
  if (report.alignment_error) {
    std::cerr << "headpose: alignment failed: " << *report.alignment_error << '\n';
    return kExitConvergence;
  }
  return kExitOk;
}

struct AlignArgs {
  PairArgs files;
  bool group_align = false, transpose = false;
  std::string out, out_rep, out_format, delta_out = "-";
  double tol = 1e-10;
  int max_iter = 100;
};

int run_align(const AlignArgs& a) {
  const std::vector<SampleRecord> samples = load_pairs(a.files);
  EvalOptions options;
  options.align = true;
  options.group_align = a.group_align;
  options.transpose_variant = a.transpose;
  options.karcher.tol = a.tol;
  options.karcher.max_iter = a.max_iter;

  // Same grouping as evaluate, then write the aligned predictions out.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].prediction) throw InvalidArgument("sample '" + samples[i].id + "' has no prediction");
    const std::string key = a.group_align ? samples[i].group.value_or("") : "";
    if (!members.count(key)) order.push_back(key);
    members[key].push_back(i);
  }
  AlignmentOptions ao;
  ao.karcher = options.karcher;
  ao.transpose_variant = a.transpose;
  std::vector<PoseRecord> aligned(samples.size());
  ordered_json groups = ordered_json::array();
  for (const std::string& key : order) {
    std::vector<Rotation> gp, gt;
    for (std::size_t i : members[key]) {
      gp.push_back(*samples[i].prediction);
      gt.push_back(samples[i].ground_truth);
    }
    const AlignedSet set = align(gp, gt, ao);
    for (std::size_t k = 0; k < members[key].size(); ++k) {
      const SampleRecord& s = samples[members[key][k]];
      aligned[members[key][k]] = {s.id, s.group, set.aligned_predictions[k]};
    }
    const EulerAngles e = rotation_to_euler(set.result.delta_hat);
    ordered_json g;
    g["group"] = key;
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < 3; ++i) {
      rows.push_back({set.result.delta_hat(i, 0), set.result.delta_hat(i, 1),
                      set.result.delta_hat(i, 2)});
    }
    g["delta_hat"] = std::move(rows);
    g["delta_euler"] = {{"pitch", round_sig6(e.pitch)}, {"yaw", round_sig6(e.yaw)},
                        {"roll", round_sig6(e.roll)}};
    g["ge_before"] = round_sig6(set.result.ge_before);
    g["ge_after"] = round_sig6(set.result.ge_after);
    g["iterations"] = set.result.iterations;
    g["final_step_norm"] = set.result.final_step_norm;
    g["dispersion_warning"] = set.result.dispersion_warning;
    groups.push_back(std::move(g));
  }
  if (!a.out.empty()) {
    const std::string out_rep = a.out_rep.empty() ? a.files.rep : a.out_rep;
    write_poses(a.out, aligned, resolve_format(a.out_format, a.out),
                parse_representation(out_rep));
  }
  ordered_json doc;
  doc["groups"] = std::move(groups);
  emit(a.delta_out, doc.dump(2) + "\n");
  return kExitOk;
}

struct SynthArgs {
  std::size_t n = 1000;
  std::string yaw = "-180:180", pitch = "-45:45", roll = "-45:45", misalign;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::size_t groups = 1;
  std::string gt_out, pred_out, rep = "matrix_rowmajor", format;
};

int run_synth(const SynthArgs& a) {
  SynthOptions o;
  o.n = a.n;
  o.yaw = parse_range(a.yaw, "--yaw");
  o.pitch = parse_range(a.pitch, "--pitch");
  o.roll = parse_range(a.roll, "--roll");
  o.noise_deg = a.noise;
  if (!a.misalign.empty()) o.misalignment = parse_euler(a.misalign, "--misalign");
  o.seed = a.seed;
  o.groups = a.groups;
  const SynthSet set = synth_generate(o);
  const Representation rep = parse_representation(a.rep);
  write_poses(a.gt_out, set.ground_truth, resolve_format(a.format, a.gt_out), rep);
  write_poses(a.pred_out, set.predictions, resolve_format(a.format, a.pred_out), rep);
  return kExitOk;
}

struct OpalArgs {
  std::optional<double> epsilon, beta, mu, sigma, peak;
  std::string samples, out = "-";
};

int run_opal_derive(const OpalArgs& a) {
  const OpalParams defaults = default_opal_params();
  const double epsilon = a.epsilon.value_or(defaults.epsilon());
  const double beta = a.beta.value_or(defaults.beta());
  const double sigma = a.sigma.value_or(defaults.sigma());
  double mu = defaults.mu();
  if (a.mu && a.peak) throw InvalidArgument("give either --mu or --peak, not both");
  if (a.mu) mu = *a.mu;
  if (a.peak) mu = *a.peak * sigma;
  if (!a.mu && !a.peak && a.sigma) mu = defaults.peak() * sigma;
  emit(a.out, to_text(derive_constants(epsilon, beta, mu, sigma)));
  return kExitOk;
}

int run_opal_fit(const OpalArgs& a) {
  const OpalParams defaults = default_opal_params();
  std::vector<double> samples;
  std::istringstream in(read_text(a.samples));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      samples.push_back(parse_double(line, "error sample"));
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, a.samples + ": " + e.what());
    }
  }
  emit(a.out, to_text(fit_params(samples, a.epsilon.value_or(defaults.epsilon()),
                                 a.beta.value_or(defaults.beta()))));
  return kExitOk;
}

struct SweepArgs {
  double step = 1.0;
  std::string out = "-";
};

int run_quat_sweep(const SweepArgs& a) {
  emit(a.out, format_quat_sweep(quat_sweep(a.step)));
  return kExitOk;
}

void add_pair_options(CLI::App* cmd, PairArgs& a) {
  cmd->add_option("--gt", a.gt, "Ground-truth pose file")->required();
  cmd->add_option("--pred", a.pred, "Prediction pose file")->required();
  cmd->add_option("--rep", a.rep, "Representation of the files")->required();
  cmd->add_option("--pred-rep", a.pred_rep, "Prediction representation, if different");
  cmd->add_option("--gt-format", a.gt_format, "csv or jsonl (default: from extension)");
  cmd->add_option("--pred-format", a.pred_format, "csv or jsonl (default: from extension)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Head-pose rotation toolkit"};
  app.set_version_flag("--version", std::string(headpose::kVersion));
  app.require_subcommand(1);

  ConvertArgs convert;
  auto* convert_cmd = app.add_subcommand("convert", "Re-serialize a pose file in another representation");
  convert_cmd->add_option("--in", convert.in, "Input pose file")->required();
  convert_cmd->add_option("--out", convert.out, "Output file (default stdout)");
  convert_cmd->add_option("--in-rep", convert.in_rep, "Input representation")->required();
  convert_cmd->add_option("--out-rep", convert.out_rep, "Output representation (default: input)");
  convert_cmd->add_option("--in-format", convert.in_format, "csv or jsonl");
  convert_cmd->add_option("--out-format", convert.out_format, "csv or jsonl");

  EvaluateArgs evaluate;
  auto* eval_cmd = app.add_subcommand("evaluate", "Compute pose metrics, optionally after alignment");
  add_pair_options(eval_cmd, evaluate.files);
  eval_cmd->add_flag("--align", evaluate.align, "Estimate and remove one global misalignment");
  eval_cmd->add_flag("--group-align", evaluate.group_align, "Estimate one misalignment per group");
  eval_cmd->add_flag("--transpose-alignment", evaluate.transpose,
                     "Apply the estimate transposed (comparison variant)");
  eval_cmd->add_option("--bins", evaluate.bins, "name:lo:hi,... on |yaw| (default frontal/profile/back)");
  eval_cmd->add_option("--yaw-filter", evaluate.yaw_filter, "Keep ground-truth yaw in MIN:MAX");
  eval_cmd->add_flag("--tri-angle-filter", evaluate.tri_angle, "Apply --yaw-filter to all three angles");
  eval_cmd->add_option("--opal", evaluate.opal, "Opal parameter file; adds the mean Opal loss");
  eval_cmd->add_option("--out", evaluate.out, "Report path (default stdout)");
  eval_cmd->add_option("--format", evaluate.format, "json or csv-summary");
  eval_cmd->add_option("--tol", evaluate.tol, "Karcher step tolerance, radians");
  eval_cmd->add_option("--max-iter", evaluate.max_iter, "Karcher iteration limit");

  AlignArgs align_args;
  auto* align_cmd = app.add_subcommand("align", "Estimate the misalignment and write aligned predictions");
  add_pair_options(align_cmd, align_args.files);
  align_cmd->add_flag("--group-align", align_args.group_align, "One misalignment per group");
  align_cmd->add_flag("--transpose-alignment", align_args.transpose, "Apply the estimate transposed");
  align_cmd->add_option("--out", align_args.out, "Aligned prediction file");
  align_cmd->add_option("--out-rep", align_args.out_rep, "Representation of the aligned file");
  align_cmd->add_option("--out-format", align_args.out_format, "csv or jsonl");
  align_cmd->add_option("--delta-out", align_args.delta_out, "Estimate summary JSON (default stdout)");
  align_cmd->add_option("--tol", align_args.tol, "Karcher step tolerance, radians");
  align_cmd->add_option("--max-iter", align_args.max_iter, "Karcher iteration limit");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic ground-truth/prediction pair");
  synth_cmd->add_option("--n", synth.n, "Number of samples");
  synth_cmd->add_option("--yaw", synth.yaw, "Yaw range MIN:MAX, degrees");
  synth_cmd->add_option("--pitch", synth.pitch, "Pitch range MIN:MAX, degrees");
  synth_cmd->add_option("--roll", synth.roll, "Roll range MIN:MAX, degrees");
  synth_cmd->add_option("--noise", synth.noise, "RMS prediction error, degrees");
  synth_cmd->add_option("--misalign", synth.misalign, "Misalignment PITCH,YAW,ROLL, degrees");
  synth_cmd->add_option("--seed", synth.seed, "Random seed");
  synth_cmd->add_option("--groups", synth.groups, "Number of round-robin groups");
  synth_cmd->add_option("--gt-out", synth.gt_out, "Ground-truth output file")->required();
  synth_cmd->add_option("--pred-out", synth.pred_out, "Prediction output file")->required();
  synth_cmd->add_option("--rep", synth.rep, "Output representation");
  synth_cmd->add_option("--format", synth.format, "csv or jsonl (default: from extension)");

  OpalArgs opal;
  auto* opal_cmd = app.add_subcommand("opal", "Opal loss parameters");
  opal_cmd->require_subcommand(1);
  auto* derive_cmd = opal_cmd->add_subcommand("derive", "Derive constants from thresholds and shape");
  derive_cmd->add_option("--epsilon", opal.epsilon, "L2/tanh threshold, degrees");
  derive_cmd->add_option("--beta", opal.beta, "tanh/L1 threshold, degrees");
  derive_cmd->add_option("--mu", opal.mu, "Shape offset (unitless)");
  derive_cmd->add_option("--sigma", opal.sigma, "Shape scale, per degree");
  derive_cmd->add_option("--peak", opal.peak, "Influence peak mu/sigma, degrees (instead of --mu)");
  derive_cmd->add_option("--out", opal.out, "Parameter file (default stdout)");
  auto* fit_cmd = opal_cmd->add_subcommand("fit", "Fit the influence peak to an error sample");
  fit_cmd->add_option("--samples", opal.samples, "File with one geodesic error (degrees) per line")
      ->required();
  fit_cmd->add_option("--epsilon", opal.epsilon, "L2/tanh threshold, degrees");
  fit_cmd->add_option("--beta", opal.beta, "tanh/L1 threshold, degrees");
  fit_cmd->add_option("--out", opal.out, "Parameter file (default stdout)");

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("quat-sweep", "Canonical quaternion along a 0-360 yaw sweep");
  sweep_cmd->add_option("--step", sweep.step, "Yaw step, degrees");
  sweep_cmd->add_option("--out", sweep.out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*convert_cmd) return run_convert(convert);
    if (*eval_cmd) return run_evaluate(evaluate);
    if (*align_cmd) return run_align(align_args);
    if (*synth_cmd) return run_synth(synth);
    if (*derive_cmd) return run_opal_derive(opal);
    if (*fit_cmd) return run_opal_fit(opal);
    if (*sweep_cmd) return run_quat_sweep(sweep);
  } catch (const headpose::ConvergenceError& e) {
    std::cerr << "headpose: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const std::exception& e) {
    std::cerr << "headpose: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
