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
#include <vector>

#include "egovel/capture.hpp"
#include "egovel/config.hpp"
#include "egovel/frame.hpp"
#include "egovel/pipeline.hpp"

namespace egovel {

enum class SlowTimePadding {
  kNone,      // DFT over exactly chirps_per_frame samples (native resolution)
  kNextPow2,  // zero-pad slow time to the next power of two
};

struct DopplerOptions {
  SlowTimePadding padding = SlowTimePadding::kNone;
  std::uint32_t rx = 0;
};

/// Range-Doppler magnitudes. Row r holds velocity offset r - center_row in
/// units of bin_velocity; positive offsets are closing velocities.
struct DopplerMap {
  std::uint32_t doppler_bins = 0;
  std::uint32_t range_bins = 0;
  std::uint32_t center_row = 0;
  double bin_velocity = 0.0;  // m/s per Doppler row
  std::vector<double> magnitude;  // row-major [doppler][range]

  double at(std::uint32_t row, std::uint32_t range_bin) const {
    return magnitude[static_cast<std::size_t>(row) * range_bins + range_bin];
  }
};

/// Effective number of slow-time DFT points for the given padding.
std::uint32_t doppler_fft_size(const RadarConfig& cfg, SlowTimePadding padding);

DopplerMap doppler_map(const Frame& frame, const ValidatedConfig& cfg,
                       const DopplerOptions& options = {});

/// Velocity at the global maximum of the map over range bins [1, N/2 - 1].
/// An all-zero frame yields velocity 0 with tracks = 0.
VelocityEstimate doppler_velocity(const Frame& frame, const ValidatedConfig& cfg,
                                  const DerivedParams& params,
                                  const DopplerOptions& options = {});

/// doppler_velocity for every frame, timestamped like process_capture. Frames
/// with an all-zero map are skipped.
std::vector<VelocityEstimate> doppler_process_capture(const Capture& capture,
                                                      const DopplerOptions& options = {});

}  // namespace egovel
