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

#ifndef ADASID_DATA_HPP
#define ADASID_DATA_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "adasid/matrix.hpp"

namespace adasid {

/// Item corpus: one feature row per item, unique string ids.
/// On disk: a one-line JSON header {"count", "dim", "ids"} followed by
/// count*dim raw little-endian float32 values, row-major.
struct ItemFeatureTable {
  std::int64_t dim = 0;
  std::vector<std::string> ids;
  Matrix rows;  // N x dim
  std::unordered_map<std::string, std::int64_t> id_to_row;

  std::int64_t count() const { return rows.rows(); }
  void rebuild_index();  // fills id_to_row, throws on duplicate ids
};

/// Trigger/target pairs resolved to feature-table row indices.
/// On disk: one "trigger_id\ttarget_id" line per pair.
struct PairList {
  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
};

ItemFeatureTable load_features(const std::string& path);
void save_features(const ItemFeatureTable& table, const std::string& path);

PairList load_pairs(const std::string& path, const ItemFeatureTable& table);
void save_pairs(const PairList& pairs, const ItemFeatureTable& table,
                const std::string& path);

struct SynthConfig {
  std::int64_t n_items = 2000;
  std::int64_t n_clusters = 20;
  std::int64_t dim = 32;
  double cluster_spread = 0.15;
  double pair_within_cluster_prob = 0.8;
  std::int64_t pairs_per_item = 2;
  std::uint64_t seed = 1;

  void validate() const;  // throws ConfigError
};

struct SynthData {
  ItemFeatureTable table;
  PairList pairs;
  std::vector<std::int64_t> labels;  // cluster id per item
};

/// Items around unit-sphere cluster centers with isotropic Gaussian spread;
/// each item gets pairs_per_item partners, within-cluster with the
/// configured probability. Fully determined by the seed.
SynthData gen_synthetic(const SynthConfig& config);

/// One training batch: corpus row indices, trigger i pairs with target i.
struct PairBatch {
  std::vector<std::int64_t> trigger_rows;
  std::vector<std::int64_t> target_rows;
};

/// Seeded shuffle of the pair list for the given epoch, cut into batches of
/// batch_size; a final batch with fewer than 2 pairs is dropped.
std::vector<PairBatch> batch_iter(const PairList& pairs, std::int64_t batch_size,
                                  std::uint64_t seed, std::int64_t epoch);

}  // namespace adasid

#endif  // ADASID_DATA_HPP
