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

#include "egovel/compare.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "egovel/csv.hpp"
#include "egovel/errors.hpp"
#include "egovel/eval.hpp"
#include "egovel/simulator.hpp"

namespace egovel {

namespace {

double mean_of(const std::vector<VelocityEstimate>& estimates) {
  double sum = 0.0;
  for (const auto& e : estimates) sum += e.velocity_mps;
  return sum / static_cast<double>(estimates.size());
}

ComparisonRow run_case(const ValidatedConfig& cfg, double velocity, std::size_t index,
                       const ComparisonOptions& options) {
  ComparisonRow row;
  row.velocity_mps = velocity;
  row.frames = options.frames;
  try {
    Scene scene;
    scene.reflectors.push_back({options.distance_m, 1.0, std::nullopt, std::nullopt});
    const NoiseSpec noise{options.snr_db, case_seed(options.seed, index)};
    const SimulationResult sim =
        synth_capture(cfg, scene, EgoTrajectory::constant(velocity), noise, options.frames);
    const FrameSeries truth = to_series(sim.truth);

    const auto phase = process_capture(sim.capture, options.pipeline);
    const auto doppler = doppler_process_capture(sim.capture, options.doppler);
    std::vector<std::string> problems;
    if (!phase.empty()) {
      row.phase_mean_mps = mean_of(phase);
      row.mae_phase = mae(to_series(phase), truth);
    } else {
      problems.push_back("no phase estimates");
    }
    if (!doppler.empty()) {
      row.doppler_mean_mps = mean_of(doppler);
      row.mae_doppler = mae(to_series(doppler), truth);
    } else {
      problems.push_back("no doppler estimates");
    }
    if (!problems.empty()) row.error = fmt::format("{}", fmt::join(problems, "; "));
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::string opt(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

}  // namespace

std::uint64_t case_seed(std::uint64_t base_seed, std::size_t index) {
  return frame_seed(base_seed ^ 0xA5A5A5A5A5A5A5A5ull, index);
}

std::vector<ComparisonRow> compare_velocities(const ValidatedConfig& cfg,
                                              std::span<const double> velocities,
                                              const ComparisonOptions& options) {
  if (velocities.empty()) throw ValueError("velocity list is empty");
  const DerivedParams params = derive_params(cfg);
  for (double v : velocities) {
    if (!std::isfinite(v) || std::abs(v) >= params.max_unambiguous_velocity) {
      throw ValueError(fmt::format("velocity {} m/s outside the unambiguous range +-{} m/s", v,
                                   params.max_unambiguous_velocity));
    }
  }

  std::vector<ComparisonRow> rows(velocities.size());
  const unsigned jobs = std::max(1u, std::min<unsigned>(options.jobs,
                                                        static_cast<unsigned>(velocities.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < velocities.size(); ++i) {
      rows[i] = run_case(cfg, velocities[i], i, options);
    }
    return rows;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < velocities.size(); i = next++) {
        rows[i] = run_case(cfg, velocities[i], i, options);
      }
    });
  }
  for (auto& t : workers) t.join();
  return rows;
}

void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out) {
  out << "velocity_mps,frames,phase_mean_mps,doppler_mean_mps,mae_phase,mae_doppler,error\n";
  for (const auto& r : rows) {
    std::string error = r.error.value_or("");
    std::replace(error.begin(), error.end(), ',', ';');
    out << csv::format_double(r.velocity_mps) << ',' << r.frames << ',' << opt(r.phase_mean_mps)
        << ',' << opt(r.doppler_mean_mps) << ',' << opt(r.mae_phase) << ','
        << opt(r.mae_doppler) << ',' << error << '\n';
  }
}

}  // namespace egovel
