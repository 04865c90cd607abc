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

#include "egovel/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

#include "egovel/errors.hpp"

namespace egovel {

namespace {

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ConfigError(fmt::format("{} must be finite and > 0 (got {})", name, value));
  }
}

void require_count(std::uint32_t value, const char* name) {
  if (value < 1) {
    throw ConfigError(fmt::format("{} must be >= 1", name));
  }
}

}  // namespace

std::uint32_t next_pow2(std::uint32_t n) {
  std::uint32_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

ValidatedConfig validate_config(const RadarConfig& cfg) {
  require_positive(cfg.carrier_freq, "carrier_freq");
  require_positive(cfg.chirp_slope, "chirp_slope");
  require_positive(cfg.sample_rate, "sample_rate");
  require_positive(cfg.chirp_repetition_time, "chirp_repetition_time");
  require_positive(cfg.frame_period, "frame_period");
  require_count(cfg.samples_per_chirp, "samples_per_chirp");
  require_count(cfg.chirps_per_frame, "chirps_per_frame");
  require_count(cfg.num_rx, "num_rx");
  if (cfg.samples_per_chirp > (1u << 30)) {
    throw ConfigError("samples_per_chirp is implausibly large");
  }

  const double active = cfg.samples_per_chirp / cfg.sample_rate;
  if (active > cfg.chirp_repetition_time) {
    throw ConfigError(fmt::format(
        "active sampling time {} s (samples_per_chirp / sample_rate) exceeds "
        "chirp_repetition_time {} s",
        active, cfg.chirp_repetition_time));
  }
  const double burst = cfg.chirps_per_frame * cfg.chirp_repetition_time;
  if (burst > cfg.frame_period) {
    throw ConfigError(fmt::format(
        "chirp burst {} s (chirps_per_frame x chirp_repetition_time) exceeds "
        "frame_period {} s",
        burst, cfg.frame_period));
  }
  return ValidatedConfig(cfg);
}

DerivedParams derive_params(const ValidatedConfig& vcfg) {
  const RadarConfig& cfg = vcfg.get();
  DerivedParams p{};
  p.wavelength = kSpeedOfLight / cfg.carrier_freq;
  p.range_fft_size = next_pow2(cfg.samples_per_chirp);
  p.range_bin_spacing =
      kSpeedOfLight * cfg.sample_rate / (2.0 * cfg.chirp_slope * p.range_fft_size);
  p.doppler_resolution =
      p.wavelength / (2.0 * cfg.chirps_per_frame * cfg.chirp_repetition_time);
  p.phase_velocity_factor = p.wavelength / (4.0 * kPi);
  p.max_unambiguous_velocity = p.wavelength / (4.0 * cfg.chirp_repetition_time);
  p.max_range = kSpeedOfLight * cfg.sample_rate / (4.0 * cfg.chirp_slope);
  return p;
}

RadarConfig config_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> kKnown = {
      "carrier_freq",      "chirp_slope",           "sample_rate",
      "samples_per_chirp", "chirps_per_frame",      "chirp_repetition_time",
      "frame_period",      "num_rx"};
  for (const auto& [key, _] : doc.items()) {
    if (!kKnown.contains(key)) {
      throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
  }

  auto number = [&](const char* key) -> double {
    if (!doc.contains(key)) throw ConfigError(fmt::format("missing config key '{}'", key));
    const auto& v = doc.at(key);
    if (!v.is_number()) throw ConfigError(fmt::format("config key '{}' must be a number", key));
    return v.get<double>();
  };
  auto count = [&](const char* key) -> std::uint32_t {
    const double v = number(key);
    if (v < 0 || v > 4294967295.0 || std::floor(v) != v) {
      throw ConfigError(fmt::format("config key '{}' must be a non-negative integer", key));
    }
    return static_cast<std::uint32_t>(v);
  };

  RadarConfig cfg;
  cfg.carrier_freq = number("carrier_freq");
  cfg.chirp_slope = number("chirp_slope");
  cfg.sample_rate = number("sample_rate");
  cfg.samples_per_chirp = count("samples_per_chirp");
  cfg.chirps_per_frame = count("chirps_per_frame");
  cfg.chirp_repetition_time = number("chirp_repetition_time");
  cfg.frame_period = number("frame_period");
  cfg.num_rx = doc.contains("num_rx") ? count("num_rx") : 1;
  return cfg;
}

nlohmann::json config_to_json(const RadarConfig& cfg) {
  return {{"carrier_freq", cfg.carrier_freq},
          {"chirp_slope", cfg.chirp_slope},
          {"sample_rate", cfg.sample_rate},
          {"samples_per_chirp", cfg.samples_per_chirp},
          {"chirps_per_frame", cfg.chirps_per_frame},
          {"chirp_repetition_time", cfg.chirp_repetition_time},
          {"frame_period", cfg.frame_period},
          {"num_rx", cfg.num_rx}};
}

RadarConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config file '{}'", path));
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(fmt::format("config file '{}' is not valid JSON: {}", path, e.what()));
  }
  return config_from_json(doc);
}

}  // namespace egovel
