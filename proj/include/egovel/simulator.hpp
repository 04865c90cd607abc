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
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "egovel/capture.hpp"
#include "egovel/config.hpp"
#include "egovel/dsp.hpp"

namespace egovel {

struct Reflector {
  double distance_m = 1.0;  // at t = 0
  double amplitude = 1.0;   // (0, 1]
  // Transient reflectors exist only for frames in [appear_frame, disappear_frame).
  std::optional<std::uint32_t> appear_frame;
  std::optional<std::uint32_t> disappear_frame;

  bool active_in(std::uint32_t frame) const {
    if (appear_frame && frame < *appear_frame) return false;
    if (disappear_frame && frame >= *disappear_frame) return false;
    return true;
  }
};

struct Scene {
  std::vector<Reflector> reflectors;
};

/// Piecewise-constant ego velocity; positive means closing on the reflectors.
struct EgoTrajectory {
  struct Segment {
    double start_s;
    double velocity_mps;
  };
  std::vector<Segment> segments;

  static EgoTrajectory constant(double velocity_mps) { return {{{0.0, velocity_mps}}}; }
};

struct NoiseSpec {
  std::optional<double> snr_db;  // nullopt = noiseless (quantization only)
  std::uint64_t seed = 0;
};

struct TruthRow {
  std::uint32_t frame;
  double time_s;
  double velocity_mps;
};

struct SimulationResult {
  Capture capture;
  std::vector<TruthRow> truth;
};

/// Checks the scene against cfg: distances in (0, max_range), amplitudes in
/// (0, 1]. Throws ValueError.
void validate_scene(const Scene& scene, const DerivedParams& params);

/// Throws ValueError unless segment starts begin at 0 and strictly increase.
void validate_trajectory(const EgoTrajectory& traj);

/// Ego displacement toward the reflectors after t seconds.
double displacement_at(const EgoTrajectory& traj, double t);

/// d(t) = d0 - integral of v over [0, t]. Throws RangeError once d <= 0.
double distance_at(const EgoTrajectory& traj, double d0, double t);

/// Mean velocity over [t0, t1]; the instantaneous velocity when t0 == t1.
double mean_velocity(const EgoTrajectory& traj, double t0, double t1);

/// One chirp of noiseless beat signal with unit-scale amplitudes.
///
/// Sample n is sum_i A_i exp(j (2 pi f_b,i tau_n + 4 pi d_i / lambda)) with
/// f_b,i = 2 S d_i / c and d_i frozen at t_slow for the whole chirp. Fast time
/// tau_n = (n - (N_s - 1) / 2) / f_s is measured from the centre of the ADC
/// window, i.e. carrier_freq is the instantaneous sweep frequency there. When
/// frame is given, transient reflectors outside their lifetime are skipped.
std::vector<cplx> synth_chirp(const ValidatedConfig& cfg, const Scene& scene,
                              const EgoTrajectory& traj, double t_slow,
                              std::optional<std::uint32_t> frame = std::nullopt);

/// Full capture synthesis with seeded complex Gaussian noise and int16
/// quantization. The strongest reflector is scaled to 25% of int16 full
/// scale. Throws RangeError, QuantizationError (clipping), ValueError.
SimulationResult synth_capture(const ValidatedConfig& cfg, const Scene& scene,
                               const EgoTrajectory& traj, const NoiseSpec& noise,
                               std::uint32_t n_frames);

/// Seed for the noise stream of one frame; independent of synthesis order.
std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame);

/// Parses {"reflectors":[...],"trajectory":[...]}.
std::pair<Scene, EgoTrajectory> scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scene& scene, const EgoTrajectory& traj);
std::pair<Scene, EgoTrajectory> load_scenario_file(const std::string& path);

void write_truth_csv(const std::vector<TruthRow>& truth, std::ostream& out);
std::vector<TruthRow> read_truth_csv(std::istream& in);

}  // namespace egovel
