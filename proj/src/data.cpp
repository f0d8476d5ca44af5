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

#include "adasid/data.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adasid/error.hpp"
#include "adasid/rng.hpp"

static_assert(std::endian::native == std::endian::little,
              "feature files are raw little-endian float32 blobs");

namespace adasid {

void ItemFeatureTable::rebuild_index() {
  id_to_row.clear();
  id_to_row.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (!id_to_row.emplace(ids[i], static_cast<std::int64_t>(i)).second) {
      throw DataError("duplicate item id \"" + ids[i] + "\"");
    }
  }
}

ItemFeatureTable load_features(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open feature file " + path);
  }
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw DataError(path + ": missing feature header line");
  }
  const nlohmann::json header = nlohmann::json::parse(header_line, nullptr, false);
  if (header.is_discarded() || !header.is_object() || !header.contains("count") ||
      !header.contains("dim") || !header.contains("ids") ||
      !header["count"].is_number_integer() || !header["dim"].is_number_integer() ||
      !header["ids"].is_array()) {
    throw DataError(path + ": malformed feature header");
  }
  const std::int64_t count = header["count"].get<std::int64_t>();
  const std::int64_t dim = header["dim"].get<std::int64_t>();
  if (count < 0 || dim < 1) {
    throw DataError(path + ": invalid count/dim in feature header");
  }
  if (static_cast<std::int64_t>(header["ids"].size()) != count) {
    throw DataError(path + ": header ids length does not match count");
  }

  ItemFeatureTable table;
  table.dim = dim;
  table.ids.reserve(static_cast<std::size_t>(count));
  for (const auto& id : header["ids"]) {
    if (!id.is_string()) {
      throw DataError(path + ": non-string item id in header");
    }
    table.ids.push_back(id.get<std::string>());
  }
  table.rebuild_index();

  table.rows = Matrix(count, dim);
  std::vector<float> buf(static_cast<std::size_t>(count * dim));
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float))) {
    throw DataError(path + ": truncated feature body (expected " +
                    std::to_string(count) + "x" + std::to_string(dim) + " floats)");
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw DataError(path + ": trailing bytes after feature body");
  }
  for (std::size_t i = 0; i < buf.size(); ++i) {
    if (!std::isfinite(buf[i])) {
      throw DataError(path + ": non-finite feature value at flat index " +
                      std::to_string(i));
    }
    table.rows.data()[i] = static_cast<double>(buf[i]);
  }
  return table;
}

void save_features(const ItemFeatureTable& table, const std::string& path) {
  nlohmann::json header;
  header["count"] = table.count();
  header["dim"] = table.dim;
  header["ids"] = table.ids;

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << header.dump() << '\n';
  std::vector<float> buf(static_cast<std::size_t>(table.rows.size()));
  for (std::size_t i = 0; i < buf.size(); ++i) {
    buf[i] = static_cast<float>(table.rows.data()[i]);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!out) {
    throw IoError("write failure on " + path);
  }
}

PairList load_pairs(const std::string& path, const ItemFeatureTable& table) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open pair file " + path);
  }
  PairList list;
  std::string line;
  std::int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected \"trigger_id\\ttarget_id\"");
    }
    const std::string trigger = line.substr(0, tab);
    const std::string target = line.substr(tab + 1);
    const auto it_tr = table.id_to_row.find(trigger);
    if (it_tr == table.id_to_row.end()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown item id \"" +
                      trigger + "\"");
    }
    const auto it_ta = table.id_to_row.find(target);
    if (it_ta == table.id_to_row.end()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown item id \"" +
                      target + "\"");
    }
    if (it_tr->second == it_ta->second) {
      throw DataError(path + ":" + std::to_string(line_no) + ": self-pair \"" +
                      trigger + "\"");
    }
    list.pairs.emplace_back(it_tr->second, it_ta->second);
  }
  return list;
}

void save_pairs(const PairList& pairs, const ItemFeatureTable& table,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  for (const auto& [tr, ta] : pairs.pairs) {
    out << table.ids[static_cast<std::size_t>(tr)] << '\t'
        << table.ids[static_cast<std::size_t>(ta)] << '\n';
  }
  if (!out) {
    throw IoError("write failure on " + path);
  }
}

void SynthConfig::validate() const {
  if (n_items < 2) throw ConfigError("synth.n_items must be >= 2");
  if (n_clusters < 1) throw ConfigError("synth.n_clusters must be >= 1");
  if (n_clusters > n_items) {
    throw ConfigError("synth.n_clusters must be <= n_items");
  }
  if (dim < 1) throw ConfigError("synth.dim must be >= 1");
  if (!(cluster_spread > 0.0)) throw ConfigError("synth.cluster_spread must be > 0");
  if (!(pair_within_cluster_prob >= 0.0 && pair_within_cluster_prob <= 1.0)) {
    throw ConfigError("synth.pair_within_cluster_prob must be in [0, 1]");
  }
  if (pairs_per_item < 1) throw ConfigError("synth.pairs_per_item must be >= 1");
}

namespace {

// Items are assigned round-robin: item i belongs to cluster i % n_clusters,
// so cluster c holds items {c, c + n_clusters, ...}.
std::int64_t cluster_size(std::int64_t c, std::int64_t n_items, std::int64_t n_clusters) {
  return (n_items - 1 - c) / n_clusters + 1;
}

std::int64_t pick_within(std::int64_t item, std::int64_t n_items,
                         std::int64_t n_clusters, RngState& rng) {
  const std::int64_t c = item % n_clusters;
  const std::int64_t size = cluster_size(c, n_items, n_clusters);
  const std::int64_t own_pos = item / n_clusters;
  std::int64_t pos = static_cast<std::int64_t>(
      rng.uniform_int(static_cast<std::uint64_t>(size - 1)));
  if (pos >= own_pos) ++pos;
  return c + pos * n_clusters;
}

std::int64_t pick_cross(std::int64_t item, std::int64_t n_items,
                        std::int64_t n_clusters, RngState& rng) {
  const std::int64_t own = item % n_clusters;
  const std::int64_t others = n_items - cluster_size(own, n_items, n_clusters);
  std::int64_t r = static_cast<std::int64_t>(
      rng.uniform_int(static_cast<std::uint64_t>(others)));
  for (std::int64_t c = 0; c < n_clusters; ++c) {
    if (c == own) continue;
    const std::int64_t size = cluster_size(c, n_items, n_clusters);
    if (r < size) return c + r * n_clusters;
    r -= size;
  }
  throw StateError("pick_cross: exhausted clusters");
}

}  // namespace

SynthData gen_synthetic(const SynthConfig& config) {
  config.validate();
  RngState rng(config.seed);
  SynthData out;

  // Unit-sphere cluster centers.
  Matrix centers(config.n_clusters, config.dim);
  for (std::int64_t c = 0; c < config.n_clusters; ++c) {
    double n2 = 0.0;
    for (std::int64_t j = 0; j < config.dim; ++j) {
      centers(c, j) = rng.normal();
      n2 += centers(c, j) * centers(c, j);
    }
    const double inv = n2 > 0.0 ? 1.0 / std::sqrt(n2) : 1.0;
    for (std::int64_t j = 0; j < config.dim; ++j) centers(c, j) *= inv;
  }

  out.table.dim = config.dim;
  out.table.rows = Matrix(config.n_items, config.dim);
  out.table.ids.reserve(static_cast<std::size_t>(config.n_items));
  out.labels.reserve(static_cast<std::size_t>(config.n_items));
  for (std::int64_t i = 0; i < config.n_items; ++i) {
    const std::int64_t c = i % config.n_clusters;
    out.labels.push_back(c);
    char id[32];
    std::snprintf(id, sizeof(id), "item_%06lld", static_cast<long long>(i));
    out.table.ids.emplace_back(id);
    for (std::int64_t j = 0; j < config.dim; ++j) {
      // Values are snapped to float32 so the in-memory table equals its
      // save/load round trip exactly.
      out.table.rows(i, j) = static_cast<double>(static_cast<float>(
          centers(c, j) + config.cluster_spread * rng.normal()));
    }
  }
  out.table.rebuild_index();

  const bool can_cross = config.n_clusters > 1;
  for (std::int64_t i = 0; i < config.n_items; ++i) {
    const std::int64_t own_size =
        cluster_size(i % config.n_clusters, config.n_items, config.n_clusters);
    for (std::int64_t p = 0; p < config.pairs_per_item; ++p) {
      const bool want_within = rng.uniform() < config.pair_within_cluster_prob;
      std::int64_t target;
      if (want_within && own_size >= 2) {
        target = pick_within(i, config.n_items, config.n_clusters, rng);
      } else if (can_cross) {
        target = pick_cross(i, config.n_items, config.n_clusters, rng);
      } else {
        // Single cluster: every partner is within-cluster.
        target = pick_within(i, config.n_items, config.n_clusters, rng);
      }
      out.pairs.pairs.emplace_back(i, target);
    }
  }
  return out;
}

std::vector<PairBatch> batch_iter(const PairList& pairs, std::int64_t batch_size,
                                  std::uint64_t seed, std::int64_t epoch) {
  if (batch_size < 2) {
    throw ConfigError("batch_size must be >= 2");
  }
  std::vector<std::int64_t> order(pairs.pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = static_cast<std::int64_t>(i);
  }
  RngState rng = RngState(seed).fork(static_cast<std::uint64_t>(epoch));
  rng.shuffle(order);

  std::vector<PairBatch> batches;
  for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
    const std::size_t end =
        std::min(order.size(), begin + static_cast<std::size_t>(batch_size));
    if (end - begin < 2) break;
    PairBatch batch;
    batch.trigger_rows.reserve(end - begin);
    batch.target_rows.reserve(end - begin);
    for (std::size_t k = begin; k < end; ++k) {
      const auto& [tr, ta] = pairs.pairs[static_cast<std::size_t>(order[k])];
      batch.trigger_rows.push_back(tr);
      batch.target_rows.push_back(ta);
    }
    batches.push_back(std::move(batch));
  }
  return batches;
}

}  // namespace adasid
