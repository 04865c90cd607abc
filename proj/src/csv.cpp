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

#include "egovel/csv.hpp"

#include <charconv>
#include <cmath>
#include <istream>

#include <fmt/format.h>

#include "egovel/errors.hpp"

namespace egovel::csv {

std::vector<std::string> split_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      break;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

namespace {

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

}  // namespace

Table read_table(std::istream& in) {
  Table table;
  std::string line;
  while (std::getline(in, line)) {
    if (blank(line)) {
      if (table.header.empty()) continue;
      break;
    }
    auto fields = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ValueError(fmt::format("CSV row has {} fields, header has {}", fields.size(),
                                   table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

std::vector<Table> read_sections(std::istream& in) {
  std::vector<Table> sections;
  while (in) {
    Table t = read_table(in);
    if (t.header.empty()) break;
    sections.push_back(std::move(t));
  }
  return sections;
}

std::size_t column(const Table& table, std::string_view name) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (table.header[i] == name) return i;
  }
  throw ValueError(fmt::format("CSV is missing column '{}'", name));
}

double to_double(const std::string& field) {
  // from_chars for double is not available in libstdc++ 11.
  if (field == "inf") return HUGE_VAL;
  if (field == "-inf") return -HUGE_VAL;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(field, &used);
  } catch (const std::exception&) {
    throw ValueError(fmt::format("'{}' is not a number", field));
  }
  if (used != field.size()) throw ValueError(fmt::format("'{}' is not a number", field));
  return v;
}

long long to_int(const std::string& field) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw ValueError(fmt::format("'{}' is not an integer", field));
  }
  return v;
}

std::string format_double(double value) { return fmt::format("{}", value); }

}  // namespace egovel::csv
