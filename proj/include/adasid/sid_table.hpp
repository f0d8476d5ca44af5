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

#ifndef ADASID_SID_TABLE_HPP
#define ADASID_SID_TABLE_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace adasid {

struct SidRow {
  std::string id;
  std::vector<std::int64_t> indices;  // length L
};

/// Item id -> discrete code sequence mapping for a frozen model.
/// On disk: one line per item, "item_id\tindex_1 index_2 ... index_L".
struct SidTable {
  std::int64_t L = 0;
  std::vector<SidRow> rows;
};

void save_sid_table(const SidTable& table, const std::string& path);
SidTable load_sid_table(const std::string& path);

}  // namespace adasid

#endif  // ADASID_SID_TABLE_HPP
