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

#include "egovel/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "egovel/csv.hpp"
#include "egovel/errors.hpp"

namespace egovel {

namespace {

std::size_t lower_median_bin(const std::vector<TrackEntry>& history) {
  std::vector<std::size_t> bins;
  bins.reserve(history.size());
  for (const auto& e : history) bins.push_back(e.bin);
  const std::size_t mid = (bins.size() - 1) / 2;
  std::nth_element(bins.begin(), bins.begin() + static_cast<std::ptrdiff_t>(mid), bins.end());
  return bins[mid];
}

std::size_t bin_distance(std::size_t a, std::size_t b) { return a > b ? a - b : b - a; }

// Recomputes the anchor and drops the oldest entries that fall outside the
// gate around it, until the history is consistent.
void settle_anchor(ReflectorTrack& track, std::size_t gate) {
  while (true) {
    track.anchor_bin = lower_median_bin(track.history);
    auto outside = std::find_if(track.history.begin(), track.history.end(), [&](const auto& e) {
      return bin_distance(e.bin, track.anchor_bin) > gate;
    });
    if (outside == track.history.end()) return;
    track.history.erase(track.history.begin(), outside + 1);
    if (track.history.empty()) return;
  }
}

}  // namespace

std::string to_string(Method method) {
  return method == Method::kPhase ? "phase" : "doppler";
}

Method method_from_string(const std::string& name) {
  if (name == "phase") return Method::kPhase;
  if (name == "doppler") return Method::kDoppler;
  throw ValueError(fmt::format("unknown estimation method '{}'", name));
}

RangeProfiles range_profiles(const Frame& frame, const ValidatedConfig& vcfg, std::uint32_t rx) {
  const RadarConfig& cfg = vcfg.get();
  if (!frame.matches(cfg)) throw ValueError("frame dimensions do not match the config");
  if (rx >= cfg.num_rx) throw ValueError(fmt::format("rx channel {} not present", rx));

  const std::uint32_t n_fft = next_pow2(cfg.samples_per_chirp);
  const std::vector<double> window = hann_window(cfg.samples_per_chirp);
  RangeProfiles profiles(frame.index(), cfg.chirps_per_frame, n_fft, cfg.chirp_repetition_time);

  for (std::uint32_t k = 0; k < cfg.chirps_per_frame; ++k) {
    const auto samples = frame.chirp(k, rx);
    auto spectrum = profiles.spectrum(k);
    std::fill(spectrum.begin(), spectrum.end(), cplx(0.0));
    for (std::size_t n = 0; n < samples.size(); ++n) {
      spectrum[n] = samples[n].to_complex() * window[n];
    }
    fft_inplace(spectrum);
  }
  return profiles;
}

std::optional<BinWindow> default_bin_window(std::uint32_t fft_size) {
  if (fft_size < 4) return std::nullopt;
  return BinWindow{1, fft_size / 2 - 1};
}

PeakSet frame_peaks(const RangeProfiles& profiles, std::size_t n, double floor_ratio) {
  const auto window = default_bin_window(profiles.fft_size());
  if (!window || profiles.num_chirps() == 0) return {};

  std::vector<double> mean(profiles.fft_size(), 0.0);
  for (std::uint32_t k = 0; k < profiles.num_chirps(); ++k) {
    const auto spectrum = profiles.spectrum(k);
    for (std::size_t b = 0; b < mean.size(); ++b) mean[b] += std::abs(spectrum[b]);
  }
  for (double& m : mean) m /= profiles.num_chirps();

  PeakSet peaks = top_n_peaks(mean, n, window->min_bin, window->max_bin);
  if (floor_ratio > 0.0 && !peaks.empty()) {
    std::vector<double> band(mean.begin() + static_cast<std::ptrdiff_t>(window->min_bin),
                             mean.begin() + static_cast<std::ptrdiff_t>(window->max_bin) + 1);
    const auto mid = band.begin() + static_cast<std::ptrdiff_t>(band.size() / 2);
    std::nth_element(band.begin(), mid, band.end());
    const double floor =
        std::max(floor_ratio * *mid, kPeakDynamicRange * peaks.peaks[0].magnitude);
    std::erase_if(peaks.peaks, [floor](const Peak& p) { return !(p.magnitude > floor); });
  }
  return peaks;
}

const TrackEntry* ReflectorTrack::entry_for(std::uint32_t frame) const {
  auto it = std::lower_bound(history.begin(), history.end(), frame,
                             [](const TrackEntry& e, std::uint32_t f) { return e.frame < f; });
  if (it == history.end() || it->frame != frame) return nullptr;
  return &*it;
}

TrackerState update_tracks(TrackerState state, const PeakSet& peaks, std::uint32_t frame,
                           const TrackerOptions& options) {
  if (state.last_frame && frame <= *state.last_frame) {
    throw OrderError(fmt::format("frame {} presented after frame {}", frame, *state.last_frame));
  }
  state.last_frame = frame;

  std::vector<bool> matched(state.tracks.size(), false);
  for (const Peak& peak : peaks.peaks) {
    std::optional<std::size_t> best;
    for (std::size_t t = 0; t < state.tracks.size(); ++t) {
      const std::size_t dist = bin_distance(state.tracks[t].track.anchor_bin, peak.bin);
      if (dist > options.gate_bins) continue;
      if (!best) {
        best = t;
        continue;
      }
      const auto& cur = state.tracks[*best].track;
      const std::size_t best_dist = bin_distance(cur.anchor_bin, peak.bin);
      if (dist < best_dist ||
          (dist == best_dist && state.tracks[t].track.anchor_bin < cur.anchor_bin)) {
        best = t;
      }
    }

    if (best) {
      if (!matched[*best]) {
        state.tracks[*best].track.history.push_back({frame, peak.bin, peak.magnitude});
        matched[*best] = true;
      }
      continue;
    }

    TrackerState::Active fresh;
    fresh.track.id = state.next_id++;
    fresh.track.history.push_back({frame, peak.bin, peak.magnitude});
    fresh.track.anchor_bin = peak.bin;
    state.tracks.push_back(std::move(fresh));
    matched.push_back(true);
  }

  for (std::size_t t = 0; t < state.tracks.size(); ++t) {
    auto& active = state.tracks[t];
    if (matched[t]) {
      active.misses = 0;
      settle_anchor(active.track, options.gate_bins);
    } else {
      ++active.misses;
    }
  }
  std::erase_if(state.tracks, [&](const TrackerState::Active& a) {
    return a.misses > options.max_misses || a.track.history.empty();
  });

  // Anchors may drift together; keep the longer-lived track of any pair that
  // ends up inside one gate.
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < state.tracks.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < state.tracks.size() && !merged; ++b) {
        const auto& ta = state.tracks[a].track;
        const auto& tb = state.tracks[b].track;
        if (bin_distance(ta.anchor_bin, tb.anchor_bin) > options.gate_bins) continue;
        const std::size_t loser = tb.history.size() > ta.history.size() ? a : b;
        state.tracks.erase(state.tracks.begin() + static_cast<std::ptrdiff_t>(loser));
        merged = true;
      }
    }
  }
  return state;
}

std::vector<ReflectorTrack> select_static_tracks(const TrackerState& state,
                                                 std::size_t min_frames) {
  std::vector<ReflectorTrack> out;
  for (const auto& active : state.tracks) {
    if (active.track.history.size() >= min_frames) out.push_back(active.track);
  }
  return out;
}

PhaseSeries extract_phase_series(const RangeProfiles& profiles, const ReflectorTrack& track) {
  const TrackEntry* entry = track.entry_for(profiles.frame_index());
  if (entry == nullptr) {
    throw MissingFrameError(fmt::format("track {} has no entry for frame {}", track.id,
                                        profiles.frame_index()));
  }
  if (entry->bin >= profiles.fft_size()) throw ValueError("track bin outside the spectrum");

  std::vector<double> raw(profiles.num_chirps());
  for (std::uint32_t k = 0; k < profiles.num_chirps(); ++k) {
    raw[k] = std::arg(profiles.spectrum(k)[entry->bin]);
  }
  return PhaseSeries{track.id, profiles.frame_index(), entry->bin,
                     raw.empty() ? raw : unwrap_phase(raw), profiles.chirp_interval_s()};
}

double estimate_track_velocity(const PhaseSeries& series, const DerivedParams& params) {
  if (series.phases.size() < 2) {
    throw InsufficientDataError("phase series needs at least two chirps");
  }
  const double slope = least_squares_slope(series.phases, series.dt);  // rad/s
  return -params.phase_velocity_factor * slope;
}

VelocityEstimate fuse_velocities(std::span<const TrackVelocity> per_track) {
  if (per_track.empty()) throw NoTracksError("no tracks to fuse");
  std::vector<double> v;
  v.reserve(per_track.size());
  for (const auto& t : per_track) v.push_back(t.velocity_mps);
  std::sort(v.begin(), v.end());

  VelocityEstimate est;
  est.velocity_mps = v[(v.size() - 1) / 2];
  est.method = Method::kPhase;
  est.tracks = static_cast<std::uint32_t>(per_track.size());
  return est;
}

std::vector<VelocityEstimate> process_capture(const Capture& capture,
                                              const PipelineOptions& options) {
  const ValidatedConfig cfg = validate_config(capture.config);
  const DerivedParams params = derive_params(cfg);
  check_capture(capture);

  std::vector<VelocityEstimate> estimates;
  TrackerState state;
  for (const Frame& frame : capture.frames) {
    const RangeProfiles profiles = range_profiles(frame, cfg, options.rx);
    const PeakSet peaks = frame_peaks(profiles, options.n_peaks, options.peak_floor_ratio);
    state = update_tracks(std::move(state), peaks, frame.index(), options.tracker);

    std::vector<TrackVelocity> per_track;
    for (const ReflectorTrack& track : select_static_tracks(state, options.min_frames)) {
      const TrackEntry* entry = track.entry_for(frame.index());
      if (entry == nullptr) continue;
      const PhaseSeries series = extract_phase_series(profiles, track);
      if (series.phases.size() < 2) continue;
      per_track.push_back({estimate_track_velocity(series, params), entry->magnitude});
    }

    if (options.on_frame) {
      options.on_frame({frame.index(), peaks.size(), state.tracks.size(), per_track.size()});
    }
    if (per_track.empty()) continue;

    VelocityEstimate est = fuse_velocities(per_track);
    est.frame = frame.index();
    est.time_s = frame.index() * capture.config.frame_period;
    estimates.push_back(est);
  }
  return estimates;
}

void write_estimates_csv(std::span<const VelocityEstimate> estimates, std::ostream& out) {
  out << "frame,time_s,velocity_mps,method,tracks\n";
  for (const auto& e : estimates) {
    out << e.frame << ',' << csv::format_double(e.time_s) << ','
        << csv::format_double(e.velocity_mps) << ',' << to_string(e.method) << ',' << e.tracks
        << '\n';
  }
}

std::vector<VelocityEstimate> read_estimates_csv(std::istream& in) {
  const csv::Table table = csv::read_table(in);
  const std::size_t c_frame = csv::column(table, "frame");
  const std::size_t c_time = csv::column(table, "time_s");
  const std::size_t c_vel = csv::column(table, "velocity_mps");
  const std::size_t c_method = csv::column(table, "method");
  const std::size_t c_tracks = csv::column(table, "tracks");

  std::vector<VelocityEstimate> out;
  for (const auto& r : table.rows) {
    VelocityEstimate e;
    e.frame = static_cast<std::uint32_t>(csv::to_int(r[c_frame]));
    e.time_s = csv::to_double(r[c_time]);
    e.velocity_mps = csv::to_double(r[c_vel]);
    e.method = method_from_string(r[c_method]);
    e.tracks = static_cast<std::uint32_t>(csv::to_int(r[c_tracks]));
    out.push_back(e);
  }
  return out;
}

}  // namespace egovel
