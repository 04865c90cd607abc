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
#include "egovel/pipeline.hpp"
#include "egovel/simulator.hpp"
#include "test_support.hpp"

namespace egovel {
namespace {

const ValidatedConfig& default_cfg() {
  static const ValidatedConfig cfg = validate_config(RadarConfig{});
  return cfg;
}

TEST(DistanceAt, ConstantAndPiecewise) {
  EXPECT_EQ(distance_at(EgoTrajectory::constant(0.0), 2.0, 123.0), 2.0);
  EXPECT_NEAR(distance_at(EgoTrajectory::constant(0.05), 2.0, 10.0), 1.5, 1e-15);
  const EgoTrajectory two{{{0.0, 0.0}, {5.0, 0.1}}};
  EXPECT_NEAR(distance_at(two, 2.0, 7.0), 1.8, 1e-15);
  EXPECT_NEAR(distance_at(two, 2.0, 5.0), 2.0, 1e-15);
}

TEST(DistanceAt, PassingTheReflectorIsARangeError) {
  EXPECT_THROW(distance_at(EgoTrajectory::constant(1.0), 2.0, 2.5), RangeError);
  EXPECT_THROW(distance_at(EgoTrajectory::constant(1.0), 2.0, 2.0), RangeError);
}

TEST(Trajectory, Validation) {
  EXPECT_THROW(validate_trajectory(EgoTrajectory{}), ValueError);
  EXPECT_THROW(validate_trajectory(EgoTrajectory{{{0.5, 0.1}}}), ValueError);
  EXPECT_THROW(validate_trajectory(EgoTrajectory{{{0.0, 0.1}, {0.0, 0.2}}}), ValueError);
  EXPECT_NO_THROW(validate_trajectory(EgoTrajectory{{{0.0, 0.1}, {1.0, 0.2}}}));
}

TEST(MeanVelocity, SegmentAverages) {
  const EgoTrajectory two{{{0.0, 0.0}, {1.0, 0.1}}};
  EXPECT_NEAR(mean_velocity(two, 0.5, 1.5), 0.05, 1e-15);
  EXPECT_EQ(mean_velocity(two, 2.0, 2.0), 0.1);
  EXPECT_EQ(mean_velocity(two, 0.2, 0.2), 0.0);
}

TEST(SynthChirp, MatchesDirectBeatModel) {
  const RadarConfig& cfg = default_cfg().get();
  Scene scene;
  scene.reflectors.push_back({2.0, 1.0, std::nullopt, std::nullopt});
  scene.reflectors.push_back({3.3, 0.4, std::nullopt, std::nullopt});
  const EgoTrajectory traj = EgoTrajectory::constant(0.07);
  const double t = 0.31;
  const auto chirp = synth_chirp(default_cfg(), scene, traj, t);
  ASSERT_EQ(chirp.size(), cfg.samples_per_chirp);

  const double lambda = kSpeedOfLight / cfg.carrier_freq;
  for (std::size_t n = 0; n < chirp.size(); n += 17) {
    const double tau = (static_cast<double>(n) - 127.5) / cfg.sample_rate;
    cplx expect = 0.0;
    for (const auto& r : scene.reflectors) {
      const double d = r.distance_m - 0.07 * t;
      const double fb = 2.0 * cfg.chirp_slope * d / kSpeedOfLight;
      expect += r.amplitude * std::exp(cplx(0.0, 2.0 * kPi * fb * tau + 4.0 * kPi * d / lambda));
    }
    EXPECT_NEAR(std::abs(chirp[n] - expect), 0.0, 1e-9) << "sample " << n;
  }
}

TEST(SynthChirp, EmptySceneIsSilent) {
  for (const cplx& v : synth_chirp(default_cfg(), Scene{}, EgoTrajectory::constant(0.1), 0.0)) {
    EXPECT_EQ(v, cplx(0.0));
  }
}

TEST(SynthChirp, ReflectorOnBinTenPeaksThere) {
  const DerivedParams p = derive_params(default_cfg());
  const auto chirp = synth_chirp(default_cfg(), testing::single_reflector(10 * p.range_bin_spacing),
                                 EgoTrajectory::constant(0.0), 0.0);
  const auto spectrum = fft_complex(chirp);
  std::size_t best = 0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    if (std::abs(spectrum[k]) > std::abs(spectrum[best])) best = k;
  }
  EXPECT_EQ(best, 10u);
  EXPECT_NEAR(std::abs(spectrum[10]), 256.0, 1e-6);  // unwindowed, bin-centred tone
}

TEST(SynthChirp, HalfWavelengthStepIsOneFullTurn) {
  const DerivedParams p = derive_params(default_cfg());
  const double d0 = 10 * p.range_bin_spacing;
  // Ego closes lambda / 2 in one chirp interval.
  const double v = 0.5 * p.wavelength / 86e-6;
  const EgoTrajectory traj = EgoTrajectory::constant(v);
  const auto a = synth_chirp(default_cfg(), testing::single_reflector(d0), traj, 0.0);
  const auto b = synth_chirp(default_cfg(), testing::single_reflector(d0), traj, 86e-6);
  // Carrier phase wraps to the same value; only the negligible beat shift remains.
  EXPECT_NEAR(std::arg(b[128] / a[128]), 0.0, 1e-3);
}

TEST(SynthChirp, TransientReflectorHonoursFrame) {
  Scene scene;
  scene.reflectors.push_back({2.0, 1.0, 3u, 4u});
  const auto before = synth_chirp(default_cfg(), scene, EgoTrajectory::constant(0.0), 0.0, 2u);
  const auto during = synth_chirp(default_cfg(), scene, EgoTrajectory::constant(0.0), 0.0, 3u);
  const auto after = synth_chirp(default_cfg(), scene, EgoTrajectory::constant(0.0), 0.0, 4u);
  EXPECT_EQ(std::abs(before[0]), 0.0);
  EXPECT_NEAR(std::abs(during[0]), 1.0, 1e-12);
  EXPECT_EQ(std::abs(after[0]), 0.0);
}

TEST(SynthChirp, DoublingAmplitudeDoublesPeak) {
  const auto one = synth_chirp(default_cfg(), testing::single_reflector(2.0, 0.4),
                               EgoTrajectory::constant(0.0), 0.0);
  const auto two = synth_chirp(default_cfg(), testing::single_reflector(2.0, 0.8),
                               EgoTrajectory::constant(0.0), 0.0);
  const auto s1 = fft_complex(one);
  const auto s2 = fft_complex(two);
  EXPECT_NEAR(std::abs(s2[10]), 2.0 * std::abs(s1[10]), 1e-9 * std::abs(s2[10]));
}

TEST(SynthCapture, StaticNoiselessFramesIdentical) {
  const SimulationResult sim = testing::simulate(0.0, 5);
  ASSERT_EQ(sim.capture.frames.size(), 5u);
  for (const auto& f : sim.capture.frames) {
    ASSERT_TRUE(std::equal(f.samples().begin(), f.samples().end(),
                           sim.capture.frames[0].samples().begin()));
  }
}

TEST(SynthCapture, SeededNoiseIsDeterministic) {
  const SimulationResult a = testing::simulate(0.02, 3, 20.0, 2.0, 42);
  const SimulationResult b = testing::simulate(0.02, 3, 20.0, 2.0, 42);
  const SimulationResult c = testing::simulate(0.02, 3, 20.0, 2.0, 43);
  EXPECT_EQ(a.capture, b.capture);
  EXPECT_NE(a.capture, c.capture);
}

TEST(SynthCapture, ScaledToQuarterFullScale) {
  const DerivedParams p = derive_params(default_cfg());
  const SimulationResult sim = testing::simulate(0.0, 1, std::nullopt, 10 * p.range_bin_spacing);
  double peak = 0.0;
  for (const auto& s : sim.capture.frames[0].samples()) peak = std::max(peak, std::abs(s.to_complex()));
  EXPECT_NEAR(peak, 0.25 * 32767, 1.0);
}

TEST(SynthCapture, TruthIsFrameAverage) {
  const EgoTrajectory traj{{{0.0, 0.01}, {0.2 + 0.5 * 663 * 86e-6, 0.03}}};
  const SimulationResult sim = synth_capture(default_cfg(), testing::single_reflector(2.0), traj,
                                             NoiseSpec{}, 3);
  ASSERT_EQ(sim.truth.size(), 3u);
  EXPECT_NEAR(sim.truth[0].velocity_mps, 0.01, 1e-12);
  EXPECT_NEAR(sim.truth[1].velocity_mps, 0.02, 1e-9);
  EXPECT_NEAR(sim.truth[2].velocity_mps, 0.03, 1e-12);
  EXPECT_NEAR(sim.truth[2].time_s, 0.4, 1e-15);
}

TEST(SynthCapture, ClippingRaisesQuantizationError) {
  EXPECT_THROW(testing::simulate(0.0, 1, -20.0), QuantizationError);
}

TEST(SynthCapture, EgoPassingReflectorIsRangeError) {
  EXPECT_THROW(testing::simulate(1.0, 20, std::nullopt, 0.5), RangeError);
}

TEST(SynthCapture, SceneValidation) {
  EXPECT_THROW(testing::simulate(0.0, 1, std::nullopt, 30.0), ValueError);
  EXPECT_THROW(synth_capture(default_cfg(), testing::single_reflector(2.0, 1.5),
                             EgoTrajectory::constant(0.0), NoiseSpec{}, 1),
               ValueError);
}

TEST(SynthCapture, PhaseStepMatchesClosedForm) {
  // Phase fidelity: consecutive-chirp phase change at the reflector bin.
  const double v = 0.05;
  const SimulationResult sim = testing::simulate(v, 1);
  const RangeProfiles prof = range_profiles(sim.capture.frames[0], default_cfg());
  const DerivedParams p = derive_params(default_cfg());
  const double expected = -4.0 * kPi * v * 86e-6 / p.wavelength;
  EXPECT_NEAR(expected, -0.013878685735364037, 1e-15);
  for (std::uint32_t k = 1; k < prof.num_chirps(); k += 37) {
    const double step = std::arg(prof.spectrum(k)[10] / prof.spectrum(k - 1)[10]);
    EXPECT_NEAR(step, expected, 1e-3) << "chirp " << k;
  }
}

TEST(SynthCapture, AmplitudeScalingDoesNotChangeSamples) {
  const ValidatedConfig& cfg = default_cfg();
  const auto a = synth_capture(cfg, testing::single_reflector(2.0, 1.0),
                               EgoTrajectory::constant(0.03), NoiseSpec{25.0, 9}, 2);
  const auto b = synth_capture(cfg, testing::single_reflector(2.0, 0.125),
                               EgoTrajectory::constant(0.03), NoiseSpec{25.0, 9}, 2);
  EXPECT_EQ(a.capture, b.capture);
}

TEST(FrameSeed, OrderIndependentAndDistinct) {
  EXPECT_EQ(frame_seed(42, 3), frame_seed(42, 3));
  EXPECT_NE(frame_seed(42, 3), frame_seed(42, 4));
  EXPECT_NE(frame_seed(42, 3), frame_seed(43, 3));
}

TEST(ScenarioJson, ParsesDocumentedExample) {
  const auto doc = nlohmann::json::parse(
      R"({"reflectors":[{"distance_m":2.0,"amplitude":1.0}],"trajectory":[{"t_s":0.0,"v_mps":0.02}]})");
  const auto [scene, traj] = scenario_from_json(doc);
  ASSERT_EQ(scene.reflectors.size(), 1u);
  EXPECT_EQ(scene.reflectors[0].distance_m, 2.0);
  ASSERT_EQ(traj.segments.size(), 1u);
  EXPECT_EQ(traj.segments[0].velocity_mps, 0.02);

  const auto again = scenario_from_json(scenario_to_json(scene, traj));
  EXPECT_EQ(again.first.reflectors[0].amplitude, 1.0);
}

TEST(ScenarioJson, RejectsTyposAndGaps) {
  EXPECT_THROW(scenario_from_json(nlohmann::json::parse(
                   R"({"reflectors":[{"distance":2.0}],"trajectory":[{"t_s":0,"v_mps":0}]})")),
               ValueError);
  EXPECT_THROW(scenario_from_json(nlohmann::json::parse(R"({"reflectors":[]})")), ValueError);
  EXPECT_THROW(scenario_from_json(nlohmann::json::parse(
                   R"({"reflectors":[],"trajectory":[{"t_s":1.0,"v_mps":0}]})")),
               ValueError);
}

TEST(TruthCsv, RoundTrip) {
  const SimulationResult sim = testing::simulate(0.0123456789, 3);
  std::stringstream buf;
  write_truth_csv(sim.truth, buf);
  EXPECT_EQ(buf.str().substr(0, 26), "frame,time_s,velocity_mps\n");
  const auto back = read_truth_csv(buf);
  ASSERT_EQ(back.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back[i].frame, sim.truth[i].frame);
    EXPECT_EQ(back[i].time_s, sim.truth[i].time_s);
    EXPECT_EQ(back[i].velocity_mps, sim.truth[i].velocity_mps);
  }
}

TEST(SynthCapture, PipelineRecoversVelocityAtThirtyDb) {
  const SimulationResult sim = testing::simulate(0.02, 20, 30.0);
  const auto est = process_capture(sim.capture);
  ASSERT_FALSE(est.empty());
  for (const auto& e : est) EXPECT_NEAR(e.velocity_mps, 0.02, 0.003);
}

}  // namespace
}  // namespace egovel
