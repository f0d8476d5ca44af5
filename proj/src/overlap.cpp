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

#include "adasid/overlap.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "adasid/error.hpp"

namespace adasid {

void RegulationConfig::validate(std::int64_t L) const {
  if (static_cast<std::int64_t>(eta.size()) != L) {
    throw ConfigError("regulation.eta must have exactly L=" + std::to_string(L) +
                      " entries");
  }
  for (std::size_t i = 0; i + 1 < eta.size(); ++i) {
    if (eta[i] > eta[i + 1]) {
      throw ConfigError("regulation.eta must be nondecreasing");
    }
  }
  if (!(f_max >= 1.0)) throw ConfigError("regulation.f_max must be >= 1");
  if (d_max < 1) throw ConfigError("regulation.d_max must be >= 1");
  if (!(alpha > 0.0)) throw ConfigError("regulation.alpha must be > 0");
  if (!(m_base > 0.0 && m_base <= 1.0)) {
    throw ConfigError("regulation.m_base must be in (0, 1]");
  }
}

std::int64_t overlap_depth(const SemanticId& a, const SemanticId& b) {
  if (a.indices.size() != b.indices.size()) {
    throw DimensionError("overlap_depth: SID lengths differ");
  }
  std::int64_t depth = 0;
  for (std::size_t l = 0; l < a.indices.size(); ++l) {
    if (a.indices[l] == b.indices[l]) ++depth;
  }
  return depth;
}

std::uint64_t collision_signature(const SemanticId& a, const SemanticId& b) {
  if (a.indices.size() != b.indices.size()) {
    throw DimensionError("collision_signature: SID lengths differ");
  }
  std::uint64_t sig = 0;
  for (std::size_t l = 0; l < a.indices.size(); ++l) {
    if (a.indices[l] == b.indices[l]) sig |= (1ULL << l);
  }
  return sig;
}

std::vector<OverlapRecord> collect_overlap_pairs(
    const std::vector<SemanticId>& sids,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& positives,
    const RegulationConfig& config) {
  std::unordered_set<std::uint64_t> positive_keys;
  if (config.exclude_positive_pairs) {
    for (const auto& [a, b] : positives) {
      const std::uint64_t lo = static_cast<std::uint64_t>(std::min(a, b));
      const std::uint64_t hi = static_cast<std::uint64_t>(std::max(a, b));
      positive_keys.insert((lo << 32) | hi);
    }
  }

  const std::int64_t n = static_cast<std::int64_t>(sids.size());
  std::vector<OverlapRecord> records;
  for (std::int64_t i = 0; i < n; ++i) {
    for (std::int64_t j = i + 1; j < n; ++j) {
      if (config.exclude_positive_pairs &&
          positive_keys.count((static_cast<std::uint64_t>(i) << 32) |
                              static_cast<std::uint64_t>(j))) {
        continue;
      }
      const std::uint64_t sig =
          collision_signature(sids[static_cast<std::size_t>(i)],
                              sids[static_cast<std::size_t>(j)]);
      if (sig == 0) continue;
      OverlapRecord rec;
      rec.i = i;
      rec.j = j;
      rec.signature = sig;
      rec.depth = std::popcount(sig);
      records.push_back(rec);
    }
  }
  return records;
}

double semantic_similarity(std::span<const double> zi, std::span<const double> zj) {
  const double ni = std::sqrt(squared_norm(zi));
  const double nj = std::sqrt(squared_norm(zj));
  if (ni == 0.0 || nj == 0.0) {
    throw NumericError("semantic_similarity: zero-norm latent");
  }
  return dot(zi, zj) / (ni * nj);
}

int relaxation_gate(double similarity, std::int64_t depth,
                    const std::vector<double>& eta) {
  if (depth < 1 || depth > static_cast<std::int64_t>(eta.size())) {
    throw StateError("relaxation_gate: depth " + std::to_string(depth) +
                     " outside 1.." + std::to_string(eta.size()));
  }
  return similarity >= eta[static_cast<std::size_t>(depth - 1)] ? 1 : 0;
}

void collision_loads(std::vector<OverlapRecord>& records) {
  std::unordered_map<std::uint64_t, std::int64_t> counts;
  for (const OverlapRecord& rec : records) ++counts[rec.signature];
  for (OverlapRecord& rec : records) rec.load = counts[rec.signature];
}

double load_scale(std::int64_t load, const RegulationConfig& config) {
  const double capped =
      static_cast<double>(std::min(load, config.d_max)) /
      static_cast<double>(config.d_max);
  return 1.0 + (config.f_max - 1.0) * std::pow(capped, config.alpha);
}

double depth_margin(std::int64_t depth, double m_base, std::int64_t L) {
  if (depth < 1 || depth > L) {
    throw StateError("margin: depth " + std::to_string(depth) + " outside 1.." +
                     std::to_string(L));
  }
  return m_base * static_cast<double>(depth) / static_cast<double>(L);
}

void finalize_records(std::vector<OverlapRecord>& records, const Matrix& z,
                      const RegulationConfig& config, std::int64_t L,
                      bool enable_sear, bool enable_las) {
  collision_loads(records);
  for (OverlapRecord& rec : records) {
    rec.similarity = semantic_similarity(z.row(rec.i), z.row(rec.j));
    rec.gate = enable_sear ? relaxation_gate(rec.similarity, rec.depth, config.eta) : 0;
    rec.scale = enable_las ? load_scale(rec.load, config) : 1.0;
    rec.margin = depth_margin(rec.depth, config.m_base, L);
  }
}

double adaptive_collision_loss(const Matrix& z,
                               std::vector<OverlapRecord>& records,
                               Matrix* grad_z) {
  if (grad_z != nullptr) {
    check_same_shape(z, *grad_z, "adaptive_collision_loss gradient");
  }
  double loss = 0.0;
  for (OverlapRecord& rec : records) {
    const std::span<const double> zi = z.row(rec.i);
    const std::span<const double> zj = z.row(rec.j);
    const double ni2 = squared_norm(zi);
    const double nj2 = squared_norm(zj);
    if (ni2 == 0.0 || nj2 == 0.0) {
      throw NumericError("adaptive_collision_loss: zero-norm latent");
    }
    const double inv_norms = 1.0 / std::sqrt(ni2 * nj2);
    const double cos = dot(zi, zj) * inv_norms;
    rec.penalty = std::max(0.0, rec.margin - (1.0 - cos));
    if (rec.gate == 1) continue;
    loss += rec.scale * rec.penalty;
    if (grad_z == nullptr || rec.penalty <= 0.0) continue;
    // d loss / d cos = scale for an active hinge; chain through the cosine.
    for (std::int64_t c = 0; c < z.cols(); ++c) {
      (*grad_z)(rec.i, c) +=
          rec.scale * (zj[static_cast<std::size_t>(c)] * inv_norms -
                       cos * zi[static_cast<std::size_t>(c)] / ni2);
      (*grad_z)(rec.j, c) +=
          rec.scale * (zi[static_cast<std::size_t>(c)] * inv_norms -
                       cos * zj[static_cast<std::size_t>(c)] / nj2);
    }
  }
  return loss;
}

}  // namespace adasid
