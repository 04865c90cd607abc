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

#include "egovel/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>

#include <fmt/format.h>

#include "egovel/csv.hpp"
#include "egovel/errors.hpp"

namespace egovel {

namespace {

constexpr double kInt16FullScale = 32767.0;
constexpr double kPeakFraction = 0.25;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::int16_t quantize(double v) {
  const double r = std::nearbyint(v);
  if (r > 32767.0 || r < -32768.0) {
    throw QuantizationError(fmt::format("sample {} clips the int16 range", v));
  }
  return static_cast<std::int16_t>(r);
}

void reject_unknown_keys(const nlohmann::json& obj, const std::set<std::string>& known,
                         const char* what) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) throw ValueError(fmt::format("unknown {} key '{}'", what, key));
  }
}

double json_number(const nlohmann::json& obj, const char* key, const char* what) {
  if (!obj.contains(key) || !obj.at(key).is_number()) {
    throw ValueError(fmt::format("{} needs numeric '{}'", what, key));
  }
  return obj.at(key).get<double>();
}

}  // namespace

void validate_scene(const Scene& scene, const DerivedParams& params) {
  for (std::size_t i = 0; i < scene.reflectors.size(); ++i) {
    const Reflector& r = scene.reflectors[i];
    if (!(r.distance_m > 0.0) || !(r.distance_m < params.max_range)) {
      throw ValueError(fmt::format("reflector {} distance {} m outside (0, {}) m", i,
                                   r.distance_m, params.max_range));
    }
    if (!(r.amplitude > 0.0) || r.amplitude > 1.0) {
      throw ValueError(fmt::format("reflector {} amplitude {} outside (0, 1]", i, r.amplitude));
    }
    if (r.appear_frame && r.disappear_frame && *r.disappear_frame <= *r.appear_frame) {
      throw ValueError(fmt::format("reflector {} disappears before it appears", i));
    }
  }
}

void validate_trajectory(const EgoTrajectory& traj) {
  if (traj.segments.empty()) throw ValueError("trajectory needs at least one segment");
  if (traj.segments.front().start_s != 0.0) {
    throw ValueError("first trajectory segment must start at t = 0");
  }
  for (std::size_t i = 0; i < traj.segments.size(); ++i) {
    const auto& s = traj.segments[i];
    if (!std::isfinite(s.velocity_mps) || !std::isfinite(s.start_s)) {
      throw ValueError(fmt::format("trajectory segment {} is not finite", i));
    }
    if (i > 0 && !(s.start_s > traj.segments[i - 1].start_s)) {
      throw ValueError("trajectory segment start times must strictly increase");
    }
  }
}

double displacement_at(const EgoTrajectory& traj, double t) {
  double travelled = 0.0;
  const auto& segs = traj.segments;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double begin = segs[i].start_s;
    if (t <= begin) break;
    const double end = (i + 1 < segs.size()) ? std::min(t, segs[i + 1].start_s) : t;
    travelled += segs[i].velocity_mps * (end - begin);
  }
  return travelled;
}

double distance_at(const EgoTrajectory& traj, double d0, double t) {
  if (t < 0.0) throw ValueError("distance_at needs t >= 0");
  const double d = d0 - displacement_at(traj, t);
  if (!(d > 0.0)) {
    throw RangeError(fmt::format("ego reached the reflector at {} m by t = {} s", d0, t));
  }
  return d;
}

double mean_velocity(const EgoTrajectory& traj, double t0, double t1) {
  if (t1 > t0) return (displacement_at(traj, t1) - displacement_at(traj, t0)) / (t1 - t0);
  double v = traj.segments.front().velocity_mps;
  for (const auto& s : traj.segments) {
    if (s.start_s <= t0) v = s.velocity_mps;
  }
  return v;
}

std::vector<cplx> synth_chirp(const ValidatedConfig& vcfg, const Scene& scene,
                              const EgoTrajectory& traj, double t_slow,
                              std::optional<std::uint32_t> frame) {
  const RadarConfig& cfg = vcfg.get();
  const double wavelength = kSpeedOfLight / cfg.carrier_freq;
  const std::size_t n_samples = cfg.samples_per_chirp;
  const double centre = 0.5 * static_cast<double>(n_samples - 1);

  std::vector<cplx> out(n_samples, 0.0);
  for (const Reflector& r : scene.reflectors) {
    if (frame && !r.active_in(*frame)) continue;
    const double d = distance_at(traj, r.distance_m, t_slow);
    const double beat = 2.0 * cfg.chirp_slope * d / kSpeedOfLight;
    const double phase = 4.0 * kPi * d / wavelength;
    const double omega = 2.0 * kPi * beat / cfg.sample_rate;  // rad per sample
    for (std::size_t n = 0; n < n_samples; ++n) {
      out[n] += std::polar(r.amplitude, omega * (static_cast<double>(n) - centre) + phase);
    }
  }
  return out;
}

std::uint64_t frame_seed(std::uint64_t seed, std::uint64_t frame) {
  return splitmix64(splitmix64(seed) ^ splitmix64(frame + 0x632BE59BD9B4E019ull));
}

SimulationResult synth_capture(const ValidatedConfig& vcfg, const Scene& scene,
                               const EgoTrajectory& traj, const NoiseSpec& noise,
                               std::uint32_t n_frames) {
  const RadarConfig& cfg = vcfg.get();
  const DerivedParams params = derive_params(vcfg);
  validate_scene(scene, params);
  validate_trajectory(traj);

  double strongest = 0.0;
  for (const auto& r : scene.reflectors) strongest = std::max(strongest, r.amplitude);
  const double scale = strongest > 0.0 ? kPeakFraction * kInt16FullScale / strongest : 0.0;
  // Per-component standard deviation, relative to the strongest amplitude.
  double sigma = 0.0;
  if (noise.snr_db && strongest > 0.0) {
    const double noise_power = strongest * strongest / std::pow(10.0, *noise.snr_db / 10.0);
    sigma = std::sqrt(noise_power / 2.0);
  }

  SimulationResult result;
  result.capture.config = cfg;
  result.capture.frames.reserve(n_frames);
  result.truth.reserve(n_frames);

  for (std::uint32_t m = 0; m < n_frames; ++m) {
    const double frame_start = m * cfg.frame_period;
    Frame frame(m, cfg.chirps_per_frame, cfg.num_rx, cfg.samples_per_chirp);
    std::mt19937_64 rng(frame_seed(noise.seed, m));
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (std::uint32_t k = 0; k < cfg.chirps_per_frame; ++k) {
      const double t_slow = frame_start + k * cfg.chirp_repetition_time;
      const std::vector<cplx> clean = synth_chirp(vcfg, scene, traj, t_slow, m);
      for (std::uint32_t rx = 0; rx < cfg.num_rx; ++rx) {
        auto dst = frame.chirp(k, rx);
        for (std::size_t n = 0; n < clean.size(); ++n) {
          cplx v = clean[n];
          if (sigma > 0.0) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            v += cplx(sigma * re, sigma * im);
          }
          v *= scale;
          dst[n] = IqSample{quantize(v.real()), quantize(v.imag())};
        }
      }
    }
    result.capture.frames.push_back(std::move(frame));

    const double last_chirp = frame_start + (cfg.chirps_per_frame - 1) * cfg.chirp_repetition_time;
    result.truth.push_back({m, frame_start, mean_velocity(traj, frame_start, last_chirp)});
  }
  return result;
}

std::pair<Scene, EgoTrajectory> scenario_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ValueError("scenario must be a JSON object");
  reject_unknown_keys(doc, {"reflectors", "trajectory"}, "scenario");
  if (!doc.contains("reflectors") || !doc.at("reflectors").is_array()) {
    throw ValueError("scenario needs a 'reflectors' array");
  }
  if (!doc.contains("trajectory") || !doc.at("trajectory").is_array()) {
    throw ValueError("scenario needs a 'trajectory' array");
  }

  Scene scene;
  for (const auto& item : doc.at("reflectors")) {
    if (!item.is_object()) throw ValueError("reflector entries must be objects");
    reject_unknown_keys(item, {"distance_m", "amplitude", "appear_frame", "disappear_frame"},
                        "reflector");
    Reflector r;
    r.distance_m = json_number(item, "distance_m", "reflector");
    r.amplitude = item.contains("amplitude") ? json_number(item, "amplitude", "reflector") : 1.0;
    if (item.contains("appear_frame")) r.appear_frame = item.at("appear_frame").get<std::uint32_t>();
    if (item.contains("disappear_frame")) {
      r.disappear_frame = item.at("disappear_frame").get<std::uint32_t>();
    }
    scene.reflectors.push_back(r);
  }

  EgoTrajectory traj;
  for (const auto& item : doc.at("trajectory")) {
    if (!item.is_object()) throw ValueError("trajectory entries must be objects");
    reject_unknown_keys(item, {"t_s", "v_mps"}, "trajectory");
    traj.segments.push_back(
        {json_number(item, "t_s", "trajectory"), json_number(item, "v_mps", "trajectory")});
  }
  validate_trajectory(traj);
  return {scene, traj};
}

nlohmann::json scenario_to_json(const Scene& scene, const EgoTrajectory& traj) {
  nlohmann::json reflectors = nlohmann::json::array();
  for (const auto& r : scene.reflectors) {
    nlohmann::json item = {{"distance_m", r.distance_m}, {"amplitude", r.amplitude}};
    if (r.appear_frame) item["appear_frame"] = *r.appear_frame;
    if (r.disappear_frame) item["disappear_frame"] = *r.disappear_frame;
    reflectors.push_back(item);
  }
  nlohmann::json trajectory = nlohmann::json::array();
  for (const auto& s : traj.segments) {
    trajectory.push_back({{"t_s", s.start_s}, {"v_mps", s.velocity_mps}});
  }
  return {{"reflectors", reflectors}, {"trajectory", trajectory}};
}

std::pair<Scene, EgoTrajectory> load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open scene file '{}'", path));
  nlohmann::json doc;
  try {
    in >> doc;
    return scenario_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ValueError(fmt::format("scene file '{}' is invalid: {}", path, e.what()));
  }
}

void write_truth_csv(const std::vector<TruthRow>& truth, std::ostream& out) {
  out << "frame,time_s,velocity_mps\n";
  for (const auto& row : truth) {
    out << row.frame << ',' << csv::format_double(row.time_s) << ','
        << csv::format_double(row.velocity_mps) << '\n';
  }
}

std::vector<TruthRow> read_truth_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  const std::size_t c_frame = csv::column(table, "frame");
  const std::size_t c_time = csv::column(table, "time_s");
  const std::size_t c_vel = csv::column(table, "velocity_mps");
  std::vector<TruthRow> rows;
  for (const auto& r : table.rows) {
    rows.push_back({static_cast<std::uint32_t>(csv::to_int(r[c_frame])), csv::to_double(r[c_time]),
                    csv::to_double(r[c_vel])});
  }
  return rows;
}

}  // namespace egovel
