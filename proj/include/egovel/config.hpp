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
#include <string>

#include <nlohmann/json.hpp>

namespace egovel {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// FMCW chirp and frame timing. All values in SI units.
///
/// The defaults reproduce a 77 GHz single-chip radar with an 86 us chirp
/// repetition interval and 5 frames per second; with 664 chirps per frame
/// the native Doppler resolution is 3.41 cm/s.
struct RadarConfig {
  double carrier_freq = 77e9;          // Hz
  double chirp_slope = 29.982e12;      // Hz/s
  double sample_rate = 10e6;           // Hz
  std::uint32_t samples_per_chirp = 256;
  std::uint32_t chirps_per_frame = 664;
  double chirp_repetition_time = 86e-6;  // s, chirp time plus processing gap
  double frame_period = 0.2;             // s
  std::uint32_t num_rx = 1;

  bool operator==(const RadarConfig&) const = default;
};

/// A RadarConfig whose invariants have been checked. Only validate_config()
/// can produce one.
class ValidatedConfig {
 public:
  const RadarConfig& get() const { return cfg_; }
  const RadarConfig* operator->() const { return &cfg_; }

 private:
  explicit ValidatedConfig(const RadarConfig& cfg) : cfg_(cfg) {}
  friend ValidatedConfig validate_config(const RadarConfig& cfg);

  RadarConfig cfg_;
};

struct DerivedParams {
  double wavelength;                // m
  std::uint32_t range_fft_size;     // next power of two >= samples_per_chirp
  double range_bin_spacing;         // m per range-FFT bin
  double doppler_resolution;        // m/s, unpadded slow-time DFT over one frame
  double phase_velocity_factor;     // m/rad, lambda / 4 pi
  double max_unambiguous_velocity;  // m/s
  double max_range;                 // m, beat frequency at half the sample rate
};

/// Throws ConfigError naming the first violated invariant.
ValidatedConfig validate_config(const RadarConfig& cfg);

DerivedParams derive_params(const ValidatedConfig& cfg);

/// Smallest power of two >= n (n >= 1).
std::uint32_t next_pow2(std::uint32_t n);

/// Parses the JSON config document. Every field listed in RadarConfig must be
/// present except num_rx (defaults to 1); unknown keys are rejected.
RadarConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const RadarConfig& cfg);
RadarConfig load_config_file(const std::string& path);

}  // namespace egovel
