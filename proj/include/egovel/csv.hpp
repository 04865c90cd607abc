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

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace egovel::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::vector<std::string> split_line(std::string_view line);

/// Reads one header line and all following rows until EOF or a blank line.
/// Throws ValueError when a row's field count differs from the header's.
Table read_table(std::istream& in);

/// Every section in a file of blank-line-separated tables.
std::vector<Table> read_sections(std::istream& in);

/// Index of a named column; throws ValueError if absent.
std::size_t column(const Table& table, std::string_view name);

double to_double(const std::string& field);
long long to_int(const std::string& field);

/// Shortest representation that parses back to the same double.
std::string format_double(double value);

}  // namespace egovel::csv
