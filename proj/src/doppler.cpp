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

#include "egovel/doppler.hpp"

#include <cmath>

#include <fmt/format.h>

#include "egovel/dsp.hpp"
#include "egovel/errors.hpp"

namespace egovel {

namespace {

// Fills rows for range bins [first, last] of a map; other columns stay zero.
DopplerMap build_map(const Frame& frame, const ValidatedConfig& vcfg,
                     const DopplerOptions& options, std::size_t first, std::size_t last) {
  const RadarConfig& cfg = vcfg.get();
  const RangeProfiles profiles = range_profiles(frame, vcfg, options.rx);
  const std::uint32_t n_chirps = cfg.chirps_per_frame;
  const std::uint32_t n_doppler = doppler_fft_size(cfg, options.padding);

  DopplerMap map;
  map.doppler_bins = n_doppler;
  map.range_bins = profiles.fft_size();
  map.center_row = n_doppler / 2;
  map.bin_velocity = kSpeedOfLight / cfg.carrier_freq /
                     (2.0 * n_doppler * cfg.chirp_repetition_time);
  map.magnitude.assign(static_cast<std::size_t>(n_doppler) * map.range_bins, 0.0);

  const std::vector<double> window = hann_window(n_chirps);
  std::vector<cplx> slow(n_doppler);
  for (std::size_t b = first; b <= last && b < map.range_bins; ++b) {
    std::fill(slow.begin(), slow.end(), cplx(0.0));
    for (std::uint32_t k = 0; k < n_chirps; ++k) {
      slow[k] = profiles.spectrum(k)[b] * window[k];
    }
    const std::vector<cplx> spectrum = dft_any_length(slow);
    // A closing target has decreasing phase, i.e. negative slow-time
    // frequency; flip so that row offsets read as closing velocity.
    for (std::uint32_t row = 0; row < n_doppler; ++row) {
      const long long offset = static_cast<long long>(row) - map.center_row;
      const long long n = n_doppler;
      const std::size_t src = static_cast<std::size_t>(((-offset) % n + n) % n);
      map.magnitude[static_cast<std::size_t>(row) * map.range_bins + b] = std::abs(spectrum[src]);
    }
  }
  return map;
}

}  // namespace

std::uint32_t doppler_fft_size(const RadarConfig& cfg, SlowTimePadding padding) {
  return padding == SlowTimePadding::kNextPow2 ? next_pow2(cfg.chirps_per_frame)
                                               : cfg.chirps_per_frame;
}

DopplerMap doppler_map(const Frame& frame, const ValidatedConfig& cfg,
                       const DopplerOptions& options) {
  const std::uint32_t n_fft = next_pow2(cfg->samples_per_chirp);
  return build_map(frame, cfg, options, 0, n_fft - 1);
}

VelocityEstimate doppler_velocity(const Frame& frame, const ValidatedConfig& cfg,
                                  const DerivedParams& params, const DopplerOptions& options) {
  VelocityEstimate est;
  est.frame = frame.index();
  est.time_s = frame.index() * cfg->frame_period;
  est.method = Method::kDoppler;

  const auto window = default_bin_window(next_pow2(cfg->samples_per_chirp));
  if (!window) return est;
  const DopplerMap map = build_map(frame, cfg, options, window->min_bin, window->max_bin);

  double best = 0.0;
  std::uint32_t best_row = map.center_row;
  for (std::uint32_t row = 0; row < map.doppler_bins; ++row) {
    for (std::size_t b = window->min_bin; b <= window->max_bin; ++b) {
      const double m = map.at(row, static_cast<std::uint32_t>(b));
      if (m > best) {
        best = m;
        best_row = row;
      }
    }
  }
  if (best == 0.0) return est;

  const double offset = static_cast<double>(best_row) - static_cast<double>(map.center_row);
  est.velocity_mps =
      offset * params.wavelength / (2.0 * map.doppler_bins * cfg->chirp_repetition_time);
  est.tracks = 1;
  return est;
}

std::vector<VelocityEstimate> doppler_process_capture(const Capture& capture,
                                                      const DopplerOptions& options) {
  const ValidatedConfig cfg = validate_config(capture.config);
  const DerivedParams params = derive_params(cfg);
  check_capture(capture);
  std::vector<VelocityEstimate> out;
  out.reserve(capture.frames.size());
  for (const Frame& frame : capture.frames) {
    VelocityEstimate est = doppler_velocity(frame, cfg, params, options);
    if (est.tracks > 0) out.push_back(est);
  }
  return out;
}

}  // namespace egovel
