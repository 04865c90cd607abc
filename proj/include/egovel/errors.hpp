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

#include <stdexcept>
#include <string>

namespace egovel {

/// Base of every error raised by the library. Each subclass maps to one
/// failure category so callers (the CLI in particular) can pick exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A RadarConfig invariant does not hold, or a config document is malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Capture container has a bad magic/version or an implausible header.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Byte stream ended before the amount of data its header promised.
class TruncatedError : public Error {
 public:
  using Error::Error;
};

class SizeError : public Error {
 public:
  using Error::Error;
};

class ValueError : public Error {
 public:
  using Error::Error;
};

/// Ego position passed a reflector (distance became non-positive).
class RangeError : public Error {
 public:
  using Error::Error;
};

class QuantizationError : public Error {
 public:
  using Error::Error;
};

class OrderError : public Error {
 public:
  using Error::Error;
};

class MissingFrameError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class NoTracksError : public Error {
 public:
  using Error::Error;
};

class NoOverlapError : public Error {
 public:
  using Error::Error;
};

/// Wraps stream failures (open, read, write) so they can be told apart from
/// content errors.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace egovel
