// Copyright 2026 The egovel Authors
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

#include "egovel/cli.hpp"

#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "egovel/capture.hpp"
#include "egovel/compare.hpp"
#include "egovel/config.hpp"
#include "egovel/csv.hpp"
#include "egovel/doppler.hpp"
#include "egovel/errors.hpp"
#include "egovel/eval.hpp"
#include "egovel/pipeline.hpp"
#include "egovel/simulator.hpp"

namespace egovel::cli {

namespace {

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return kIo;
  if (dynamic_cast<const RangeError*>(&e) || dynamic_cast<const QuantizationError*>(&e) ||
      dynamic_cast<const NoTracksError*>(&e) ||
      dynamic_cast<const InsufficientDataError*>(&e) ||
      dynamic_cast<const MissingFrameError*>(&e)) {
    return kComputation;
  }
  if (dynamic_cast<const Error*>(&e)) return kUsage;
  return kComputation;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  return in;
}

void close_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("writing '{}' failed", path));
}

RadarConfig config_or_default(const std::string& path) {
  return path.empty() ? RadarConfig{} : load_config_file(path);
}

struct SimulateArgs {
  std::string config;
  std::string scene;
  std::uint32_t frames = 20;
  std::uint64_t seed = 0;
  std::optional<double> snr_db;
  std::string out;
  std::string truth;
};

struct EstimateArgs {
  std::string capture;
  std::string out;
  std::size_t n_peaks = 5;
  std::size_t min_frames = 3;
};

struct BaselineArgs {
  std::string capture;
  std::string out;
  std::string pad = "none";
};

struct EvaluateArgs {
  std::vector<std::string> estimates;
  std::string truth;
  std::string out;
  std::vector<double> buckets;
};

struct CompareArgs {
  std::string config;
  std::vector<std::string> velocities;
  std::string out;
  std::uint32_t frames = 20;
  std::uint64_t seed = 0;
  std::optional<double> snr_db;
  double distance = 2.0;
  unsigned jobs = 1;
  std::size_t n_peaks = 5;
  std::size_t min_frames = 3;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err, bool verbose) {
  const ValidatedConfig cfg = validate_config(config_or_default(a.config));
  const DerivedParams params = derive_params(cfg);
  const auto [scene, traj] = load_scenario_file(a.scene);
  const SimulationResult sim = synth_capture(cfg, scene, traj, NoiseSpec{a.snr_db, a.seed}, a.frames);

  std::ofstream cap = open_output(a.out);
  const std::uint64_t bytes = write_capture(sim.capture, cap);
  close_output(cap, a.out);
  std::ofstream truth = open_output(a.truth);
  write_truth_csv(sim.truth, truth);
  close_output(truth, a.truth);

  fmt::print(out, "wavelength_m={} doppler_resolution_mps={} range_bin_m={} max_velocity_mps={}\n",
             params.wavelength, params.doppler_resolution, params.range_bin_spacing,
             params.max_unambiguous_velocity);
  fmt::print(out, "wrote {} frames ({} bytes) to {}\n", sim.capture.frames.size(), bytes, a.out);
  if (verbose) fmt::print(err, "truth rows: {}\n", sim.truth.size());
  return kOk;
}

int write_estimates(const std::vector<VelocityEstimate>& estimates, const std::string& path,
                    std::size_t frames, std::ostream& out, std::ostream& err) {
  std::ofstream csv_out = open_output(path);
  write_estimates_csv(estimates, csv_out);
  close_output(csv_out, path);
  if (estimates.empty()) {
    fmt::print(err, "warning: no velocity estimates produced from {} frames\n", frames);
  }
  fmt::print(out, "wrote {} estimates to {}\n", estimates.size(), path);
  return kOk;
}

Capture load_capture_for_cli(const std::string& path) {
  std::ifstream in = open_input(path);
  return read_capture(in);
}

int cmd_estimate(const EstimateArgs& a, std::ostream& out, std::ostream& err, bool verbose) {
  if (a.n_peaks == 0) throw ValueError("--n-peaks must be >= 1");
  if (a.min_frames == 0) throw ValueError("--min-frames must be >= 1");
  const Capture capture = load_capture_for_cli(a.capture);

  PipelineOptions options;
  options.n_peaks = a.n_peaks;
  options.min_frames = a.min_frames;
  if (verbose) {
    options.on_frame = [&err](const FrameDiagnostics& d) {
      fmt::print(err, "frame {}: {} peaks, {} active tracks, {} static tracks\n", d.frame,
                 d.peaks, d.active_tracks, d.static_tracks);
    };
  }
  return write_estimates(process_capture(capture, options), a.out, capture.frames.size(), out,
                         err);
}

int cmd_baseline(const BaselineArgs& a, std::ostream& out, std::ostream& err) {
  DopplerOptions options;
  if (a.pad == "pow2") {
    options.padding = SlowTimePadding::kNextPow2;
  } else if (a.pad != "none") {
    throw ValueError(fmt::format("--pad must be 'none' or 'pow2', got '{}'", a.pad));
  }
  const Capture capture = load_capture_for_cli(a.capture);
  return write_estimates(doppler_process_capture(capture, options), a.out, capture.frames.size(),
                         out, err);
}

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  std::optional<FrameSeries> phase;
  std::optional<FrameSeries> doppler;
  for (const auto& path : a.estimates) {
    std::ifstream in = open_input(path);
    for (const auto& e : read_estimates_csv(in)) {
      auto& series = e.method == Method::kPhase ? phase : doppler;
      if (!series) series.emplace();
      (*series)[e.frame] = e.velocity_mps;
    }
  }
  if (!phase && !doppler) throw ValueError("estimate files contain no rows");

  std::ifstream truth_in = open_input(a.truth);
  const FrameSeries truth = to_series(read_truth_csv(truth_in));
  const std::vector<double> edges = a.buckets.empty() ? default_bucket_edges() : a.buckets;
  const EvalReport report = build_report(truth, phase ? &*phase : nullptr,
                                         doppler ? &*doppler : nullptr, edges);

  std::ofstream report_out = open_output(a.out);
  write_report(report, report_out);
  close_output(report_out, a.out);

  std::vector<std::string> parts;
  for (Method m : report.methods) {
    parts.push_back(fmt::format("mae_{}={:.6g} m/s", to_string(m), report.mae_mps.at(m)));
  }
  fmt::print(out, "{} over {} frames\n", fmt::join(parts, " "), report.rows.size());
  return kOk;
}

int cmd_compare(const CompareArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<double> velocities;
  for (const auto& token : a.velocities) {
    if (token.empty()) throw ValueError("--velocities has an empty entry");
    velocities.push_back(csv::to_double(token));
  }
  if (velocities.empty()) throw ValueError("--velocities needs at least one value");
  const ValidatedConfig cfg = validate_config(config_or_default(a.config));

  ComparisonOptions options;
  options.frames = a.frames;
  options.distance_m = a.distance;
  options.snr_db = a.snr_db;
  options.seed = a.seed;
  options.jobs = a.jobs;
  options.pipeline.n_peaks = a.n_peaks;
  options.pipeline.min_frames = a.min_frames;
  const auto rows = compare_velocities(cfg, velocities, options);

  std::ofstream report = open_output(a.out);
  write_comparison_csv(rows, report);
  close_output(report, a.out);

  auto cell = [](const std::optional<double>& v) {
    return v ? fmt::format("{:.5f}", *v) : std::string("-");
  };
  fmt::print(out, "{:>10} {:>12} {:>12} {:>12} {:>12}\n", "v_true", "v_phase", "v_doppler",
             "mae_phase", "mae_doppler");
  bool failed = false;
  for (const auto& r : rows) {
    fmt::print(out, "{:>10.5f} {:>12} {:>12} {:>12} {:>12}\n", r.velocity_mps,
               cell(r.phase_mean_mps), cell(r.doppler_mean_mps), cell(r.mae_phase),
               cell(r.mae_doppler));
    if (r.error) {
      failed = true;
      fmt::print(err, "velocity {}: {}\n", r.velocity_mps, *r.error);
    }
  }
  return failed ? kComputation : kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radar ego-velocity estimation from FMCW phase", "egovel"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("--verbose,-v", verbose, "Per-frame diagnostics on stderr");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Synthesize a raw ADC capture and truth CSV");
  simulate->add_option("--config", sim.config, "Radar config JSON (defaults if omitted)");
  simulate->add_option("--scene", sim.scene, "Scene and trajectory JSON")->required();
  simulate->add_option("--frames", sim.frames, "Number of frames")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Noise seed")->capture_default_str();
  simulate->add_option("--snr-db", sim.snr_db, "SNR in dB (noiseless if omitted)");
  simulate->add_option("--out", sim.out, "Output MMP1 capture")->required();
  simulate->add_option("--truth", sim.truth, "Output ground-truth CSV")->required();
  simulate->add_flag("--verbose,-v", verbose);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Phase-slope ego-velocity estimates");
  estimate->add_option("--capture", est.capture, "Input MMP1 capture")->required();
  estimate->add_option("--out", est.out, "Output estimates CSV")->required();
  estimate->add_option("--n-peaks", est.n_peaks, "Range peaks per frame")->capture_default_str();
  estimate->add_option("--min-frames", est.min_frames, "Frames before a track counts as static")
      ->capture_default_str();
  estimate->add_flag("--verbose,-v", verbose);

  BaselineArgs base;
  auto* baseline = app.add_subcommand("baseline", "Doppler-FFT peak velocity estimates");
  baseline->add_option("--capture", base.capture, "Input MMP1 capture")->required();
  baseline->add_option("--out", base.out, "Output estimates CSV")->required();
  baseline->add_option("--pad", base.pad, "Slow-time zero padding: none|pow2")->capture_default_str();
  baseline->add_flag("--verbose,-v", verbose);

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "MAE report against ground truth");
  evaluate->add_option("--estimates", ev.estimates, "Estimate CSV files")->required();
  evaluate->add_option("--truth", ev.truth, "Ground-truth CSV")->required();
  evaluate->add_option("--out", ev.out, "Output report CSV")->required();
  evaluate->add_option("--buckets", ev.buckets, "Bucket edges in m/s");
  evaluate->add_flag("--verbose,-v", verbose);

  CompareArgs cmp;
  auto* compare = app.add_subcommand("compare", "Simulate and score both methods per velocity");
  compare->add_option("--config", cmp.config, "Radar config JSON (defaults if omitted)");
  compare->add_option("--velocities", cmp.velocities, "Ego velocities in m/s")
      ->required()
      ->delimiter(',');
  compare->add_option("--out", cmp.out, "Output comparison CSV")->required();
  compare->add_option("--frames", cmp.frames, "Frames per case")->capture_default_str();
  compare->add_option("--seed", cmp.seed, "Base noise seed")->capture_default_str();
  compare->add_option("--snr-db", cmp.snr_db, "SNR in dB (noiseless if omitted)");
  compare->add_option("--distance", cmp.distance, "Reflector distance in m")->capture_default_str();
  compare->add_option("--jobs", cmp.jobs, "Parallel workers")->capture_default_str();
  compare->add_option("--n-peaks", cmp.n_peaks, "Range peaks per frame")->capture_default_str();
  compare->add_option("--min-frames", cmp.min_frames)->capture_default_str();
  compare->add_flag("--verbose,-v", verbose);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out, err, verbose);
    if (estimate->parsed()) return cmd_estimate(est, out, err, verbose);
    if (baseline->parsed()) return cmd_baseline(base, out, err);
    if (evaluate->parsed()) return cmd_evaluate(ev, out);
    if (compare->parsed()) return cmd_compare(cmp, out, err);
  } catch (const std::exception& e) {
    fmt::print(err, "error: {}\n", e.what());
    return exit_code_for(e);
  }
  return kUsage;
}

}  // namespace egovel::cli
