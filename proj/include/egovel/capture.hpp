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
#include <vector>

#include "egovel/config.hpp"
#include "egovel/frame.hpp"

namespace egovel {

/// A self-describing sequence of frames that all share one configuration.
struct Capture {
  RadarConfig config;
  std::vector<Frame> frames;
  std::optional<std::string> source;  // not serialized

  bool operator==(const Capture& other) const {
    return config == other.config && frames == other.frames;
  }
};

/// Size of the MMP1 header in bytes.
inline constexpr std::size_t kCaptureHeaderSize = 62;
inline constexpr std::uint16_t kCaptureVersion = 1;
/// Largest payload a reader will accept before allocating.
inline constexpr std::uint64_t kDefaultPayloadCap = 4ull << 30;

/// Size in bytes of one frame's payload under cfg.
std::uint64_t frame_payload_bytes(const RadarConfig& cfg);

/// Throws ValueError if a frame disagrees with the config or indices are not
/// 0..n-1.
void check_capture(const Capture& capture);

/// Writes the MMP1 container. Validation happens before any byte is emitted.
std::uint64_t write_capture(const Capture& capture, std::ostream& sink);

Capture read_capture(std::istream& source,
                     std::uint64_t payload_cap = kDefaultPayloadCap);

/// Headerless little-endian int16 I/Q, frame -> chirp -> rx -> sample order.
Capture read_raw_iq(std::istream& source, const ValidatedConfig& cfg,
                    std::uint64_t payload_cap = kDefaultPayloadCap);

void save_capture_file(const Capture& capture, const std::string& path);
Capture load_capture_file(const std::string& path);

}  // namespace egovel
