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

#include "egovel/capture.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "egovel/errors.hpp"

namespace egovel {

namespace {

static_assert(std::endian::native == std::endian::little,
              "byte (de)serialization assumes a little-endian host");

class ByteWriter {
 public:
  explicit ByteWriter(std::ostream& out) : out_(out) {}

  template <typename T>
  void put(T value) {
    std::array<char, sizeof(T)> buf;
    std::memcpy(buf.data(), &value, sizeof(T));
    write(buf.data(), buf.size());
  }

  void write(const char* data, std::size_t n) {
    out_.write(data, static_cast<std::streamsize>(n));
    if (!out_) throw IoError("write failed");
    written_ += n;
  }

  std::uint64_t written() const { return written_; }

 private:
  std::ostream& out_;
  std::uint64_t written_ = 0;
};

// Reads exactly n bytes or reports how many were available.
std::size_t read_some(std::istream& in, char* dst, std::size_t n) {
  in.read(dst, static_cast<std::streamsize>(n));
  return static_cast<std::size_t>(in.gcount());
}

template <typename T>
T get(const char*& p) {
  T value;
  std::memcpy(&value, p, sizeof(T));
  p += sizeof(T);
  return value;
}

void read_frame_payload(std::istream& in, Frame& frame, const char* what) {
  auto samples = frame.samples();
  const std::size_t bytes = samples.size() * sizeof(IqSample);
  static_assert(sizeof(IqSample) == 4);
  const std::size_t got = read_some(in, reinterpret_cast<char*>(samples.data()), bytes);
  if (got != bytes) {
    throw TruncatedError(fmt::format("{}: frame {} truncated ({} of {} bytes)", what,
                                     frame.index(), got, bytes));
  }
}

}  // namespace

std::uint64_t frame_payload_bytes(const RadarConfig& cfg) {
  return static_cast<std::uint64_t>(cfg.chirps_per_frame) * cfg.num_rx *
         cfg.samples_per_chirp * sizeof(IqSample);
}

void check_capture(const Capture& capture) {
  for (std::size_t n = 0; n < capture.frames.size(); ++n) {
    const Frame& f = capture.frames[n];
    if (f.index() != n) {
      throw ValueError(fmt::format("frame at position {} has index {}", n, f.index()));
    }
    if (!f.matches(capture.config)) {
      throw ValueError(fmt::format(
          "frame {} has dimensions {}x{}x{}, config expects {}x{}x{}", n, f.num_chirps(),
          f.num_rx(), f.samples_per_chirp(), capture.config.chirps_per_frame,
          capture.config.num_rx, capture.config.samples_per_chirp));
    }
  }
}

std::uint64_t write_capture(const Capture& capture, std::ostream& sink) {
  validate_config(capture.config);
  check_capture(capture);
  if (capture.frames.size() > 0xFFFFFFFFu) throw ValueError("too many frames for MMP1");

  const RadarConfig& c = capture.config;
  ByteWriter w(sink);
  w.write("MMP1", 4);
  w.put<std::uint16_t>(kCaptureVersion);
  w.put<double>(c.carrier_freq);
  w.put<double>(c.chirp_slope);
  w.put<double>(c.sample_rate);
  w.put<std::uint32_t>(c.samples_per_chirp);
  w.put<std::uint32_t>(c.chirps_per_frame);
  w.put<std::uint32_t>(c.num_rx);
  w.put<double>(c.chirp_repetition_time);
  w.put<double>(c.frame_period);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(capture.frames.size()));
  for (const Frame& f : capture.frames) {
    auto s = f.samples();
    w.write(reinterpret_cast<const char*>(s.data()), s.size() * sizeof(IqSample));
  }
  return w.written();
}

Capture read_capture(std::istream& source, std::uint64_t payload_cap) {
  std::array<char, kCaptureHeaderSize> header;
  const std::size_t got = read_some(source, header.data(), header.size());
  if (got >= 4 && std::memcmp(header.data(), "MMP1", 4) != 0) {
    throw FormatError("bad magic: not an MMP1 capture");
  }
  if (got < header.size()) {
    if (got < 4) throw FormatError("stream too short for an MMP1 header");
    throw TruncatedError(fmt::format("header truncated ({} of {} bytes)", got, header.size()));
  }

  const char* p = header.data() + 4;
  const auto version = get<std::uint16_t>(p);
  if (version != kCaptureVersion) {
    throw FormatError(fmt::format("unsupported MMP1 version {}", version));
  }
  RadarConfig cfg;
  cfg.carrier_freq = get<double>(p);
  cfg.chirp_slope = get<double>(p);
  cfg.sample_rate = get<double>(p);
  cfg.samples_per_chirp = get<std::uint32_t>(p);
  cfg.chirps_per_frame = get<std::uint32_t>(p);
  cfg.num_rx = get<std::uint32_t>(p);
  cfg.chirp_repetition_time = get<double>(p);
  cfg.frame_period = get<double>(p);
  const auto frame_count = get<std::uint32_t>(p);

  validate_config(cfg);
  const std::uint64_t per_frame = frame_payload_bytes(cfg);
  if (frame_count > 0 && (per_frame > payload_cap || frame_count > payload_cap / per_frame)) {
    throw FormatError(fmt::format("header claims {} frames of {} bytes, above the {} byte cap",
                                  frame_count, per_frame, payload_cap));
  }

  Capture capture;
  capture.config = cfg;
  capture.frames.reserve(frame_count);
  for (std::uint32_t n = 0; n < frame_count; ++n) {
    Frame frame(n, cfg.chirps_per_frame, cfg.num_rx, cfg.samples_per_chirp);
    read_frame_payload(source, frame, "MMP1 payload");
    capture.frames.push_back(std::move(frame));
  }
  if (source.peek() != std::char_traits<char>::eof()) {
    throw FormatError("trailing bytes after the last MMP1 frame");
  }
  return capture;
}

Capture read_raw_iq(std::istream& source, const ValidatedConfig& vcfg,
                    std::uint64_t payload_cap) {
  const RadarConfig& cfg = vcfg.get();
  const std::uint64_t per_frame = frame_payload_bytes(cfg);
  if (per_frame > payload_cap) {
    throw FormatError("a single frame exceeds the payload cap");
  }

  Capture capture;
  capture.config = cfg;
  std::uint64_t total = 0;
  for (std::uint32_t n = 0;; ++n) {
    if (source.peek() == std::char_traits<char>::eof()) break;
    if (total + per_frame > payload_cap) {
      throw FormatError(fmt::format("raw stream exceeds the {} byte cap", payload_cap));
    }
    Frame frame(n, cfg.chirps_per_frame, cfg.num_rx, cfg.samples_per_chirp);
    read_frame_payload(source, frame, "raw I/Q stream");
    capture.frames.push_back(std::move(frame));
    total += per_frame;
  }
  return capture;
}

void save_capture_file(const Capture& capture, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  write_capture(capture, out);
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

Capture load_capture_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open capture '{}'", path));
  Capture capture = read_capture(in);
  capture.source = path;
  return capture;
}

}  // namespace egovel
