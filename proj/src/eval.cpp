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

#include "egovel/eval.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "egovel/csv.hpp"
#include "egovel/errors.hpp"

namespace egovel {

namespace {

void accumulate(BucketRow& bucket, const JoinedRow& row, std::span<const Method> methods,
                std::map<Method, double>& sums) {
  ++bucket.count;
  for (Method m : methods) {
    const auto v = row.value(m);
    if (!v) continue;
    sums[m] += std::abs(*v - row.truth_mps);
    ++bucket.errors[m].count;
  }
}

void finish(BucketRow& bucket, std::span<const Method> methods,
            const std::map<Method, double>& sums) {
  for (Method m : methods) {
    MethodError& e = bucket.errors[m];
    if (e.count > 0) e.mae_mps = sums.at(m) / static_cast<double>(e.count);
  }
}

std::string optional_field(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : std::string();
}

std::optional<double> parse_optional(const std::string& field) {
  if (field.empty()) return std::nullopt;
  return csv::to_double(field);
}

}  // namespace

FrameSeries to_series(std::span<const VelocityEstimate> estimates) {
  FrameSeries s;
  for (const auto& e : estimates) s[e.frame] = e.velocity_mps;
  return s;
}

FrameSeries to_series(std::span<const TruthRow> truth) {
  FrameSeries s;
  for (const auto& t : truth) s[t.frame] = t.velocity_mps;
  return s;
}

double mae(const FrameSeries& estimates, const FrameSeries& truth) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& [frame, v] : estimates) {
    auto it = truth.find(frame);
    if (it == truth.end()) continue;
    sum += std::abs(v - it->second);
    ++n;
  }
  if (n == 0) throw NoOverlapError("estimate and truth series share no frame");
  return sum / static_cast<double>(n);
}

std::vector<JoinedRow> join_rows(const FrameSeries& truth, const FrameSeries* phase,
                                 const FrameSeries* doppler) {
  auto lookup = [](const FrameSeries* s, std::uint32_t f) -> std::optional<double> {
    if (s == nullptr) return std::nullopt;
    auto it = s->find(f);
    if (it == s->end()) return std::nullopt;
    return it->second;
  };
  std::vector<JoinedRow> rows;
  for (const auto& [frame, v] : truth) {
    JoinedRow row{frame, v, lookup(phase, frame), lookup(doppler, frame)};
    if (row.phase_mps || row.doppler_mps) rows.push_back(row);
  }
  return rows;
}

std::size_t BucketTable::total_count() const {
  std::size_t n = underflow.count + overflow.count;
  for (const auto& b : buckets) n += b.count;
  return n;
}

BucketTable bucketed_errors(std::span<const JoinedRow> rows, std::span<const double> edges,
                            std::span<const Method> methods) {
  if (edges.size() < 2) throw ValueError("bucketing needs at least two edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ValueError("bucket edges must strictly increase");
  }

  constexpr double kInf = std::numeric_limits<double>::infinity();
  BucketTable table;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    table.buckets.push_back(BucketRow{edges[i], edges[i + 1], 0, {}});
  }
  table.underflow = BucketRow{-kInf, edges.front(), 0, {}};
  table.overflow = BucketRow{edges.back(), kInf, 0, {}};

  std::vector<std::map<Method, double>> sums(table.buckets.size());
  std::map<Method, double> under_sums;
  std::map<Method, double> over_sums;
  for (const JoinedRow& row : rows) {
    const double v = row.truth_mps;
    if (v < edges.front()) {
      accumulate(table.underflow, row, methods, under_sums);
    } else if (v >= edges.back()) {
      accumulate(table.overflow, row, methods, over_sums);
    } else {
      // upper_bound gives the first edge > v; the bucket starts one before it.
      const auto it = std::upper_bound(edges.begin(), edges.end(), v);
      const std::size_t idx = static_cast<std::size_t>(it - edges.begin()) - 1;
      accumulate(table.buckets[idx], row, methods, sums[idx]);
    }
  }
  for (std::size_t i = 0; i < table.buckets.size(); ++i) finish(table.buckets[i], methods, sums[i]);
  finish(table.underflow, methods, under_sums);
  finish(table.overflow, methods, over_sums);
  return table;
}

EvalReport build_report(const FrameSeries& truth, const FrameSeries* phase,
                        const FrameSeries* doppler, std::span<const double> edges) {
  EvalReport report;
  if (phase != nullptr) {
    report.methods.push_back(Method::kPhase);
    report.mae_mps[Method::kPhase] = mae(*phase, truth);
  }
  if (doppler != nullptr) {
    report.methods.push_back(Method::kDoppler);
    report.mae_mps[Method::kDoppler] = mae(*doppler, truth);
  }
  report.rows = join_rows(truth, phase, doppler);
  report.buckets = bucketed_errors(report.rows, edges, report.methods);
  return report;
}

std::uint64_t write_report(const EvalReport& report, std::ostream& sink) {
  std::ostringstream out;
  out << "method,mae_mps\n";
  for (Method m : report.methods) {
    out << to_string(m) << ',' << csv::format_double(report.mae_mps.at(m)) << '\n';
  }

  out << "\nbucket_lo,bucket_hi,method,mae_mps,count\n";
  auto bucket_lines = [&](const BucketRow& b) {
    for (Method m : report.methods) {
      auto it = b.errors.find(m);
      const MethodError e = it == b.errors.end() ? MethodError{} : it->second;
      out << csv::format_double(b.lo) << ',' << csv::format_double(b.hi) << ','
          << to_string(m) << ',' << optional_field(e.mae_mps) << ',' << e.count << '\n';
    }
  };
  for (const auto& b : report.buckets.buckets) bucket_lines(b);
  if (report.buckets.underflow.count > 0) bucket_lines(report.buckets.underflow);
  if (report.buckets.overflow.count > 0) bucket_lines(report.buckets.overflow);

  out << "\nframe,truth_mps,phase_mps,doppler_mps\n";
  for (const auto& r : report.rows) {
    out << r.frame << ',' << csv::format_double(r.truth_mps) << ',' << optional_field(r.phase_mps)
        << ',' << optional_field(r.doppler_mps) << '\n';
  }

  const std::string text = out.str();
  sink.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!sink) throw IoError("report write failed");
  return text.size();
}

EvalReport read_report(std::istream& in) {
  const std::vector<csv::Table> sections = csv::read_sections(in);
  if (sections.size() != 3) {
    throw ValueError(fmt::format("report has {} sections, expected 3", sections.size()));
  }
  EvalReport report;

  const csv::Table& summary = sections[0];
  for (const auto& r : summary.rows) {
    const Method m = method_from_string(r[csv::column(summary, "method")]);
    report.methods.push_back(m);
    report.mae_mps[m] = csv::to_double(r[csv::column(summary, "mae_mps")]);
  }

  const csv::Table& buckets = sections[1];
  for (const auto& r : buckets.rows) {
    const double lo = csv::to_double(r[csv::column(buckets, "bucket_lo")]);
    const double hi = csv::to_double(r[csv::column(buckets, "bucket_hi")]);
    const Method m = method_from_string(r[csv::column(buckets, "method")]);
    MethodError e;
    e.mae_mps = parse_optional(r[csv::column(buckets, "mae_mps")]);
    e.count = static_cast<std::size_t>(csv::to_int(r[csv::column(buckets, "count")]));

    BucketRow* target = nullptr;
    if (std::isinf(lo)) {
      target = &report.buckets.underflow;
    } else if (std::isinf(hi)) {
      target = &report.buckets.overflow;
    } else {
      if (report.buckets.buckets.empty() || report.buckets.buckets.back().lo != lo) {
        report.buckets.buckets.push_back(BucketRow{lo, hi, 0, {}});
      }
      target = &report.buckets.buckets.back();
    }
    target->lo = lo;
    target->hi = hi;
    target->errors[m] = e;
    target->count = std::max(target->count, e.count);
  }

  const csv::Table& rows = sections[2];
  for (const auto& r : rows.rows) {
    JoinedRow row;
    row.frame = static_cast<std::uint32_t>(csv::to_int(r[csv::column(rows, "frame")]));
    row.truth_mps = csv::to_double(r[csv::column(rows, "truth_mps")]);
    row.phase_mps = parse_optional(r[csv::column(rows, "phase_mps")]);
    row.doppler_mps = parse_optional(r[csv::column(rows, "doppler_mps")]);
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace egovel
