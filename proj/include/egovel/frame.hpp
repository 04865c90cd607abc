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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "egovel/config.hpp"

namespace egovel {

/// One quantized ADC sample as stored on disk.
struct IqSample {
  std::int16_t i = 0;
  std::int16_t q = 0;

  bool operator==(const IqSample&) const = default;

  std::complex<double> to_complex() const {
    return {static_cast<double>(i), static_cast<double>(q)};
  }
};

/// Raw ADC data of one frame, laid out chirp -> rx -> sample (fast time
/// innermost).
class Frame {
 public:
  Frame() = default;
  Frame(std::uint32_t index, std::uint32_t chirps, std::uint32_t rx,
        std::uint32_t samples)
      : index_(index),
        chirps_(chirps),
        rx_(rx),
        samples_(samples),
        data_(static_cast<std::size_t>(chirps) * rx * samples) {}

  std::uint32_t index() const { return index_; }
  void set_index(std::uint32_t index) { index_ = index; }
  std::uint32_t num_chirps() const { return chirps_; }
  std::uint32_t num_rx() const { return rx_; }
  std::uint32_t samples_per_chirp() const { return samples_; }

  std::span<const IqSample> chirp(std::uint32_t k, std::uint32_t rx = 0) const {
    return {data_.data() + offset(k, rx), samples_};
  }
  std::span<IqSample> chirp(std::uint32_t k, std::uint32_t rx = 0) {
    return {data_.data() + offset(k, rx), samples_};
  }

  std::span<const IqSample> samples() const { return data_; }
  std::span<IqSample> samples() { return data_; }

  bool matches(const RadarConfig& cfg) const {
    return chirps_ == cfg.chirps_per_frame && rx_ == cfg.num_rx &&
           samples_ == cfg.samples_per_chirp &&
           data_.size() == static_cast<std::size_t>(chirps_) * rx_ * samples_;
  }

  bool operator==(const Frame&) const = default;

 private:
  std::size_t offset(std::uint32_t k, std::uint32_t rx) const {
    return (static_cast<std::size_t>(k) * rx_ + rx) * samples_;
  }

  std::uint32_t index_ = 0;
  std::uint32_t chirps_ = 0;
  std::uint32_t rx_ = 0;
  std::uint32_t samples_ = 0;
  std::vector<IqSample> data_;
};

}  // namespace egovel
