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
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egovel/capture.hpp"
#include "egovel/config.hpp"
#include "egovel/dsp.hpp"
#include "egovel/frame.hpp"

namespace egovel {

enum class Method { kPhase, kDoppler };

std::string to_string(Method method);
/// Throws ValueError for anything but "phase" or "doppler".
Method method_from_string(const std::string& name);

/// Fast-time spectra of every chirp in one frame for a single rx channel.
class RangeProfiles {
 public:
  RangeProfiles(std::uint32_t frame_index, std::uint32_t num_chirps, std::uint32_t fft_size,
                double chirp_interval_s)
      : frame_index_(frame_index),
        num_chirps_(num_chirps),
        fft_size_(fft_size),
        chirp_interval_s_(chirp_interval_s),
        bins_(static_cast<std::size_t>(num_chirps) * fft_size) {}

  std::uint32_t frame_index() const { return frame_index_; }
  std::uint32_t num_chirps() const { return num_chirps_; }
  std::uint32_t fft_size() const { return fft_size_; }
  double chirp_interval_s() const { return chirp_interval_s_; }

  std::span<const cplx> spectrum(std::uint32_t chirp) const {
    return {bins_.data() + static_cast<std::size_t>(chirp) * fft_size_, fft_size_};
  }
  std::span<cplx> spectrum(std::uint32_t chirp) {
    return {bins_.data() + static_cast<std::size_t>(chirp) * fft_size_, fft_size_};
  }

 private:
  std::uint32_t frame_index_;
  std::uint32_t num_chirps_;
  std::uint32_t fft_size_;
  double chirp_interval_s_;
  std::vector<cplx> bins_;
};

/// Hann-windowed, zero-padded range FFT of each chirp on channel rx.
RangeProfiles range_profiles(const Frame& frame, const ValidatedConfig& cfg,
                             std::uint32_t rx = 0);

/// Default search window for reflector peaks: [1, N/2 - 1], which drops DC
/// and the negative-frequency half.
struct BinWindow {
  std::size_t min_bin;
  std::size_t max_bin;
};
std::optional<BinWindow> default_bin_window(std::uint32_t fft_size);

/// Default floor for frame_peaks: 20 dB above the median magnitude.
inline constexpr double kDefaultPeakFloorRatio = 10.0;

/// Peaks more than 60 dB below the strongest one are dropped with the floor.
inline constexpr double kPeakDynamicRange = 1e-3;

/// Top-n local maxima of the chirp-averaged magnitude profile. Peaks not
/// above floor_ratio times the median magnitude of the search window are
/// dropped; floor_ratio <= 0 disables the floor.
PeakSet frame_peaks(const RangeProfiles& profiles, std::size_t n,
                    double floor_ratio = kDefaultPeakFloorRatio);

struct TrackEntry {
  std::uint32_t frame;
  std::size_t bin;
  double magnitude;
};

struct ReflectorTrack {
  std::uint64_t id = 0;
  std::vector<TrackEntry> history;  // strictly increasing frame
  std::size_t anchor_bin = 0;       // lower median of history bins

  const TrackEntry* entry_for(std::uint32_t frame) const;
};

struct TrackerOptions {
  std::size_t gate_bins = 3;        // max |bin - anchor| for a match
  std::uint32_t max_misses = 2;     // consecutive misses tolerated
};

struct TrackerState {
  struct Active {
    ReflectorTrack track;
    std::uint32_t misses = 0;
  };
  std::vector<Active> tracks;  // ascending id
  std::uint64_t next_id = 0;
  std::optional<std::uint32_t> last_frame;
};

/// Associates one frame's peaks with the active tracks.
///
/// Peaks are taken strongest first. A peak joins the nearest active anchor
/// within the gate (ties go to the lower anchor); if that track already has
/// an entry for this frame the peak is absorbed. A peak with no anchor in
/// range opens a new track. Unmatched tracks count a miss and are retired
/// after more than max_misses consecutive misses. Throws OrderError if frame
/// does not increase.
TrackerState update_tracks(TrackerState state, const PeakSet& peaks, std::uint32_t frame,
                           const TrackerOptions& options = {});

/// Tracks whose history holds at least min_frames entries.
std::vector<ReflectorTrack> select_static_tracks(const TrackerState& state,
                                                 std::size_t min_frames = 3);

struct PhaseSeries {
  std::uint64_t track_id;
  std::uint32_t frame;
  std::size_t bin;
  std::vector<double> phases;  // unwrapped, one per chirp
  double dt;                   // s between samples
};

/// Unwrapped per-chirp phase at the track's bin for the profiles' frame.
/// Throws MissingFrameError when the track has no entry for that frame.
PhaseSeries extract_phase_series(const RangeProfiles& profiles, const ReflectorTrack& track);

/// v = -(lambda / 4 pi) * d(phi)/dt, with the slope taken by least squares.
/// Positive means closing on the reflector. Throws InsufficientDataError.
double estimate_track_velocity(const PhaseSeries& series, const DerivedParams& params);

struct VelocityEstimate {
  std::uint32_t frame = 0;
  double time_s = 0.0;
  double velocity_mps = 0.0;
  Method method = Method::kPhase;
  std::uint32_t tracks = 0;  // contributing reflectors

  bool operator==(const VelocityEstimate&) const = default;
};

struct TrackVelocity {
  double velocity_mps;
  double magnitude;
};

/// Lower median of the per-track velocities. Throws NoTracksError when empty.
VelocityEstimate fuse_velocities(std::span<const TrackVelocity> per_track);

struct FrameDiagnostics {
  std::uint32_t frame;
  std::size_t peaks;
  std::size_t active_tracks;
  std::size_t static_tracks;
};

struct PipelineOptions {
  std::size_t n_peaks = 5;
  std::size_t min_frames = 3;
  double peak_floor_ratio = kDefaultPeakFloorRatio;
  TrackerOptions tracker;
  std::uint32_t rx = 0;
  std::function<void(const FrameDiagnostics&)> on_frame;
};

/// Runs the phase-slope estimator over a capture, frame by frame. Frames
/// without a confirmed static track produce no estimate.
std::vector<VelocityEstimate> process_capture(const Capture& capture,
                                              const PipelineOptions& options = {});

void write_estimates_csv(std::span<const VelocityEstimate> estimates, std::ostream& out);
std::vector<VelocityEstimate> read_estimates_csv(std::istream& in);

}  // namespace egovel
