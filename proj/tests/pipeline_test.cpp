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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "egovel/errors.hpp"
#include "egovel/eval.hpp"
#include "egovel/pipeline.hpp"
#include "test_support.hpp"

namespace egovel {
namespace {

const ValidatedConfig& cfg() {
  static const ValidatedConfig c = validate_config(RadarConfig{});
  return c;
}

const DerivedParams& params() {
  static const DerivedParams p = derive_params(cfg());
  return p;
}

double bin_distance(std::size_t bin) { return bin * params().range_bin_spacing; }

TEST(RangeProfiles, ToneOnBinTenPeaksInEveryChirp) {
  const SimulationResult sim = testing::simulate(0.0, 1, std::nullopt, bin_distance(10));
  const RangeProfiles prof = range_profiles(sim.capture.frames[0], cfg());
  EXPECT_EQ(prof.fft_size(), 256u);
  EXPECT_EQ(prof.num_chirps(), 664u);
  for (std::uint32_t k = 0; k < prof.num_chirps(); k += 50) {
    const auto mags = magnitudes(prof.spectrum(k));
    const auto best = std::max_element(mags.begin(), mags.end()) - mags.begin();
    EXPECT_EQ(best, 10);
  }
}

TEST(RangeProfiles, ZeroFrameGivesZeroSpectra) {
  const Frame zero(0, 664, 1, 256);
  const RangeProfiles prof = range_profiles(zero, cfg());
  for (std::uint32_t k = 0; k < prof.num_chirps(); ++k) {
    for (const cplx& v : prof.spectrum(k)) ASSERT_EQ(v, cplx(0.0));
  }
}

TEST(RangeProfiles, ZeroPadsToNextPowerOfTwo) {
  RadarConfig c;
  c.samples_per_chirp = 200;
  const ValidatedConfig v = validate_config(c);
  const RangeProfiles prof = range_profiles(Frame(0, 664, 1, 200), v);
  EXPECT_EQ(prof.fft_size(), 256u);
  EXPECT_THROW(range_profiles(Frame(0, 664, 1, 256), v), ValueError);
}

TEST(FramePeaks, SingleReflector) {
  const SimulationResult sim = testing::simulate(0.0, 1, std::nullopt, bin_distance(10));
  const PeakSet p = frame_peaks(range_profiles(sim.capture.frames[0], cfg()), 5);
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.peaks[0].bin, 10u);
}

TEST(FramePeaks, TwoReflectorsStrongerFirst) {
  Scene scene;
  scene.reflectors.push_back({bin_distance(30), 0.5, std::nullopt, std::nullopt});
  scene.reflectors.push_back({bin_distance(12), 1.0, std::nullopt, std::nullopt});
  const auto sim = synth_capture(cfg(), scene, EgoTrajectory::constant(0.0), NoiseSpec{30.0, 1}, 1);
  const PeakSet p = frame_peaks(range_profiles(sim.capture.frames[0], cfg()), 2);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.peaks[0].bin, 12u);
  EXPECT_EQ(p.peaks[1].bin, 30u);
}

TEST(FramePeaks, EmptySceneHasNoPeaks) {
  const auto sim = synth_capture(cfg(), Scene{}, EgoTrajectory::constant(0.0), NoiseSpec{}, 1);
  EXPECT_TRUE(frame_peaks(range_profiles(sim.capture.frames[0], cfg()), 5).empty());
}

TEST(FramePeaks, FloorDropsNoiseOnlyPeaks) {
  const SimulationResult sim = testing::simulate(0.0, 1, 30.0, bin_distance(10));
  const RangeProfiles prof = range_profiles(sim.capture.frames[0], cfg());
  EXPECT_EQ(frame_peaks(prof, 5).size(), 1u);
  EXPECT_EQ(frame_peaks(prof, 5, 0.0).size(), 5u);
}

ReflectorTrack track_at(std::size_t bin, std::uint32_t frame) {
  ReflectorTrack t;
  t.id = 7;
  t.history.push_back({frame, bin, 1.0});
  t.anchor_bin = bin;
  return t;
}

TEST(ExtractPhaseSeries, StationaryIsConstant) {
  const SimulationResult sim = testing::simulate(0.0, 1);
  const RangeProfiles prof = range_profiles(sim.capture.frames[0], cfg());
  const PhaseSeries s = extract_phase_series(prof, track_at(10, 0));
  ASSERT_EQ(s.phases.size(), 664u);
  EXPECT_EQ(s.dt, 86e-6);
  for (double ph : s.phases) EXPECT_NEAR(ph, s.phases[0], 1e-9);
}

TEST(ExtractPhaseSeries, ApproachingDecreasesAtClosedFormRate) {
  const SimulationResult sim = testing::simulate(0.05, 1);
  const PhaseSeries s =
      extract_phase_series(range_profiles(sim.capture.frames[0], cfg()), track_at(10, 0));
  const double step = -4.0 * kPi * 0.05 * 86e-6 / params().wavelength;  // -0.0138787 rad
  for (std::size_t k = 1; k < s.phases.size(); ++k) {
    ASSERT_LT(s.phases[k], s.phases[k - 1]);
    ASSERT_NEAR(s.phases[k] - s.phases[k - 1], step, 1e-4);
  }
  EXPECT_LT(s.phases.back() - s.phases.front(), -2.0 * kPi);  // unwrapped across turns
}

TEST(ExtractPhaseSeries, MissingFrame) {
  const SimulationResult sim = testing::simulate(0.0, 1);
  const RangeProfiles prof = range_profiles(sim.capture.frames[0], cfg());
  EXPECT_THROW(extract_phase_series(prof, track_at(10, 3)), MissingFrameError);
}

PhaseSeries series_from(std::vector<double> phases) {
  return PhaseSeries{0, 0, 10, std::move(phases), 86e-6};
}

TEST(EstimateTrackVelocity, ConstantIsZero) {
  EXPECT_EQ(estimate_track_velocity(series_from(std::vector<double>(664, 1.25)), params()), 0.0);
}

TEST(EstimateTrackVelocity, LinearPhaseGivesVelocity) {
  std::vector<double> ph(664);
  for (std::size_t k = 0; k < ph.size(); ++k) ph[k] = 0.3 - 0.01385 * k;
  // slope = -0.01385 / 86 us = -161.05 rad/s; v = (lambda / 4 pi) * 161.05
  const double v = estimate_track_velocity(series_from(ph), params());
  EXPECT_NEAR(v, 0.049896655432974, 1e-12);
  EXPECT_NEAR(v, 0.04990, 1e-5);
}

TEST(EstimateTrackVelocity, TooShort) {
  EXPECT_THROW(estimate_track_velocity(series_from({1.0}), params()), InsufficientDataError);
}

TEST(FuseVelocities, MedianRules) {
  const std::vector<TrackVelocity> one = {{0.05, 1.0}};
  EXPECT_EQ(fuse_velocities(one).velocity_mps, 0.05);
  EXPECT_EQ(fuse_velocities(one).tracks, 1u);

  const std::vector<TrackVelocity> three = {{0.05, 1.0}, {0.30, 9.0}, {0.051, 1.0}};
  EXPECT_EQ(fuse_velocities(three).velocity_mps, 0.051);
  EXPECT_EQ(fuse_velocities(three).tracks, 3u);

  const std::vector<TrackVelocity> two = {{0.04, 1.0}, {0.02, 1.0}};
  EXPECT_EQ(fuse_velocities(two).velocity_mps, 0.02);

  EXPECT_THROW(fuse_velocities(std::vector<TrackVelocity>{}), NoTracksError);
}

double phase_mae(const SimulationResult& sim, const PipelineOptions& options = {}) {
  const auto est = process_capture(sim.capture, options);
  return mae(to_series(est), to_series(sim.truth));
}

TEST(ProcessCapture, NoiselessTwoCentimetresPerSecond) {
  const SimulationResult sim = testing::simulate(0.02, 20);
  const auto est = process_capture(sim.capture);
  // The first two frames build the track up to min_frames.
  ASSERT_EQ(est.size(), 18u);
  EXPECT_EQ(est.front().frame, 2u);
  EXPECT_NEAR(est.front().time_s, 0.4, 1e-15);
  EXPECT_EQ(est.front().method, Method::kPhase);
  EXPECT_LT(phase_mae(sim), 1e-4);
}

TEST(ProcessCapture, AllZeroCaptureYieldsNothing) {
  Capture c;
  c.config = RadarConfig{};
  for (std::uint32_t n = 0; n < 4; ++n) c.frames.emplace_back(n, 664, 1, 256);
  EXPECT_TRUE(process_capture(c).empty());
}

TEST(ProcessCapture, BelowDopplerResolution) {
  EXPECT_LT(phase_mae(testing::simulate(0.005, 20)), 0.003);
}

TEST(ProcessCapture, AmplitudeInvariant) {
  const auto a = synth_capture(cfg(), testing::single_reflector(2.0, 1.0),
                               EgoTrajectory::constant(0.04), NoiseSpec{}, 6);
  const auto b = synth_capture(cfg(), testing::single_reflector(2.0, 0.3),
                               EgoTrajectory::constant(0.04), NoiseSpec{}, 6);
  const auto ea = process_capture(a.capture);
  const auto eb = process_capture(b.capture);
  ASSERT_EQ(ea.size(), eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    EXPECT_NEAR(ea[i].velocity_mps, eb[i].velocity_mps, 1e-9);
  }
}

TEST(ProcessCapture, FinerThanDopplerResolution) {
  // Noiseless 2 mm/s steps must give distinct, ordered estimates.
  double previous = -1.0;
  for (double v = 0.010; v <= 0.0181; v += 0.002) {
    const auto est = process_capture(testing::simulate(v, 4).capture);
    ASSERT_FALSE(est.empty());
    const double mean = est.back().velocity_mps;
    EXPECT_NEAR(mean, v, 1e-5);
    EXPECT_GT(mean, previous + 0.0015);
    previous = mean;
  }
}

TEST(ProcessCapture, TransientGhostIsIgnored) {
  Scene scene = testing::single_reflector(2.0);
  scene.reflectors.push_back({bin_distance(40), 1.0, 5u, 6u});  // one-frame ghost
  const auto sim = synth_capture(cfg(), scene, EgoTrajectory::constant(0.03), NoiseSpec{30.0, 3}, 10);
  std::vector<FrameDiagnostics> diag;
  PipelineOptions options;
  options.on_frame = [&](const FrameDiagnostics& d) { diag.push_back(d); };
  const auto est = process_capture(sim.capture, options);
  ASSERT_EQ(diag.size(), 10u);
  EXPECT_EQ(diag[5].peaks, 2u);
  for (const auto& e : est) {
    EXPECT_EQ(e.tracks, 1u);
    EXPECT_NEAR(e.velocity_mps, 0.03, 1e-4);
  }
}

TEST(ProcessCapture, MultipleStaticReflectorsFuse) {
  Scene scene;
  scene.reflectors.push_back({1.5, 1.0, std::nullopt, std::nullopt});
  scene.reflectors.push_back({4.1, 0.6, std::nullopt, std::nullopt});
  scene.reflectors.push_back({7.7, 0.4, std::nullopt, std::nullopt});
  const auto sim = synth_capture(cfg(), scene, EgoTrajectory::constant(-0.06), NoiseSpec{30.0, 5}, 8);
  const auto est = process_capture(sim.capture);
  ASSERT_EQ(est.size(), 6u);
  for (const auto& e : est) {
    EXPECT_EQ(e.tracks, 3u);
    EXPECT_NEAR(e.velocity_mps, -0.06, 1e-3);
  }
}

TEST(ProcessCapture, PiecewiseTrajectoryFollowsTruth) {
  const EgoTrajectory traj{{{0.0, 0.01}, {1.0, 0.06}, {2.0, -0.02}}};
  const auto sim = synth_capture(cfg(), testing::single_reflector(2.0), traj, NoiseSpec{30.0, 8}, 15);
  EXPECT_LT(phase_mae(sim), 1e-3);
}

TEST(EstimatesCsv, RoundTrip) {
  const std::vector<VelocityEstimate> est = {{2, 0.4, 0.0199999, Method::kPhase, 1},
                                             {3, 0.6, -0.1 / 3.0, Method::kDoppler, 0}};
  std::stringstream buf;
  write_estimates_csv(est, buf);
  EXPECT_EQ(buf.str().rfind("frame,time_s,velocity_mps,method,tracks\n", 0), 0u);
  EXPECT_EQ(read_estimates_csv(buf), est);
}

TEST(EstimatesCsv, BadMethodRejected) {
  std::istringstream in("frame,time_s,velocity_mps,method,tracks\n0,0,0.1,imu,1\n");
  EXPECT_THROW(read_estimates_csv(in), ValueError);
}

}  // namespace
}  // namespace egovel
