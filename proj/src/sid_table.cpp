// Copyright 2026 The AdaSID Authors.
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

#include "adasid/sid_table.hpp"

#include <fstream>
#include <sstream>

#include "adasid/error.hpp"

namespace adasid {

void save_sid_table(const SidTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  for (const SidRow& row : table.rows) {
    out << row.id << '\t';
    for (std::size_t l = 0; l < row.indices.size(); ++l) {
      if (l > 0) out << ' ';
      out << row.indices[l];
    }
    out << '\n';
  }
  if (!out) {
    throw IoError("write failure on " + path);
  }
}

SidTable load_sid_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open SID table " + path);
  }
  SidTable table;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected \"item_id\\tindex ...\"");
    }
    SidRow row;
    row.id = line.substr(0, tab);
    std::istringstream rest(line.substr(tab + 1));
    std::int64_t idx;
    while (rest >> idx) {
      if (idx < 0) {
        throw DataError(path + ":" + std::to_string(line_no) +
                        ": negative code index");
      }
      row.indices.push_back(idx);
    }
    if (!rest.eof()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": non-integer code index");
    }
    if (row.indices.empty()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": no code indices");
    }
    if (table.L == 0) {
      table.L = static_cast<std::int64_t>(row.indices.size());
    } else if (static_cast<std::int64_t>(row.indices.size()) != table.L) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": SID length differs from earlier rows");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace adasid
