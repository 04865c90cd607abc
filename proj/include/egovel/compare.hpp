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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egovel/config.hpp"
#include "egovel/doppler.hpp"
#include "egovel/pipeline.hpp"

namespace egovel {

/// One simulated single-reflector run per velocity, scored with both
/// estimators.
struct ComparisonOptions {
  std::uint32_t frames = 20;
  double distance_m = 2.0;
  std::optional<double> snr_db;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  PipelineOptions pipeline;
  DopplerOptions doppler;
};

struct ComparisonRow {
  double velocity_mps = 0.0;
  std::uint32_t frames = 0;
  std::optional<double> phase_mean_mps;
  std::optional<double> doppler_mean_mps;
  std::optional<double> mae_phase;
  std::optional<double> mae_doppler;
  std::optional<std::string> error;
};

/// Noise seed of case `index`; identical whether cases run serially or in
/// parallel.
std::uint64_t case_seed(std::uint64_t base_seed, std::size_t index);

/// Runs every case. Failures are captured per row rather than thrown.
/// Throws ValueError for an empty list or a velocity outside the
/// unambiguous range.
std::vector<ComparisonRow> compare_velocities(const ValidatedConfig& cfg,
                                              std::span<const double> velocities,
                                              const ComparisonOptions& options = {});

/// CSV: velocity_mps,frames,phase_mean_mps,doppler_mean_mps,mae_phase,mae_doppler,error
void write_comparison_csv(std::span<const ComparisonRow> rows, std::ostream& out);

}  // namespace egovel
