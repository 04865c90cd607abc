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
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "egovel/pipeline.hpp"
#include "egovel/simulator.hpp"

namespace egovel {

/// Velocity per frame index.
using FrameSeries = std::map<std::uint32_t, double>;

FrameSeries to_series(std::span<const VelocityEstimate> estimates);
FrameSeries to_series(std::span<const TruthRow> truth);

/// Mean |estimate - truth| over frames present in both. Throws
/// NoOverlapError when no frame is shared.
double mae(const FrameSeries& estimates, const FrameSeries& truth);

struct JoinedRow {
  std::uint32_t frame;
  double truth_mps;
  std::optional<double> phase_mps;
  std::optional<double> doppler_mps;

  std::optional<double> value(Method m) const {
    return m == Method::kPhase ? phase_mps : doppler_mps;
  }
};

/// Truth frames that carry at least one estimate, ascending by frame.
std::vector<JoinedRow> join_rows(const FrameSeries& truth, const FrameSeries* phase,
                                 const FrameSeries* doppler);

struct MethodError {
  std::optional<double> mae_mps;  // absent when no row in the bucket has this method
  std::size_t count = 0;
};

/// Half-open [lo, hi) on truth velocity.
struct BucketRow {
  double lo;
  double hi;
  std::size_t count = 0;
  std::map<Method, MethodError> errors;
};

/// Regular buckets from the edges plus (-inf, edges[0]) and [edges.back(), inf)
/// so every joined row is accounted for.
struct BucketTable {
  std::vector<BucketRow> buckets;
  BucketRow underflow;
  BucketRow overflow;

  std::size_t total_count() const;
};

inline const std::vector<double>& default_bucket_edges() {
  static const std::vector<double> edges = {0.0, 0.0341, 0.05, 0.10};
  return edges;
}

/// Throws ValueError unless there are at least two strictly increasing edges.
BucketTable bucketed_errors(std::span<const JoinedRow> rows, std::span<const double> edges,
                            std::span<const Method> methods);

struct EvalReport {
  std::vector<Method> methods;
  std::map<Method, double> mae_mps;
  BucketTable buckets;
  std::vector<JoinedRow> rows;
};

/// Joins the given series against truth and fills every section. A method
/// without any overlapping frame raises NoOverlapError.
EvalReport build_report(const FrameSeries& truth, const FrameSeries* phase,
                        const FrameSeries* doppler,
                        std::span<const double> edges = default_bucket_edges());

/// Three blank-line separated CSV sections:
///   method,mae_mps
///   bucket_lo,bucket_hi,method,mae_mps,count
///   frame,truth_mps,phase_mps,doppler_mps
std::uint64_t write_report(const EvalReport& report, std::ostream& sink);

/// Inverse of write_report, used for checking the format.
EvalReport read_report(std::istream& in);

}  // namespace egovel
