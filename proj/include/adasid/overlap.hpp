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

#ifndef ADASID_OVERLAP_HPP
#define ADASID_OVERLAP_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "adasid/matrix.hpp"
#include "adasid/tokenizer.hpp"

namespace adasid {

/// One in-batch SID overlap pair with everything both adaptive stages
/// attach to it. Gates, loads, and scales are constants of the step;
/// only the hinge penalty carries gradient.
struct OverlapRecord {
  std::int64_t i = 0;
  std::int64_t j = 0;
  std::int64_t depth = 0;       // number of shared code positions, >= 1
  std::uint64_t signature = 0;  // bit l-1 set iff layer l codes match
  std::int64_t load = 0;        // records sharing this signature, incl. self
  double scale = 1.0;           // load-adaptive strengthening factor
  double similarity = 0.0;      // cosine of encoder-side latents
  int gate = 0;                 // 1 relaxes (drops) the collision term
  double margin = 0.0;          // hinge margin for this depth
  double penalty = 0.0;         // max(0, margin - cosine distance)
};

struct RegulationConfig {
  std::vector<double> eta = {0.18, 0.24, 0.30};  // per-depth gate thresholds
  double f_max = 2.0;
  std::int64_t d_max = 8;
  double alpha = 1.0;
  double m_base = 0.5;
  bool exclude_positive_pairs = true;

  void validate(std::int64_t L) const;  // throws ConfigError
};

/// Count of positions where the two code sequences agree.
std::int64_t overlap_depth(const SemanticId& a, const SemanticId& b);

/// Bit pattern of positionwise agreement; popcount equals overlap_depth.
std::uint64_t collision_signature(const SemanticId& a, const SemanticId& b);

/// All unordered pairs (i < j) with positive overlap depth, minus matched
/// positives when the config says to exclude them. Fills i, j, depth,
/// signature only.
std::vector<OverlapRecord> collect_overlap_pairs(
    const std::vector<SemanticId>& sids,
    const std::vector<std::pair<std::int64_t, std::int64_t>>& positives,
    const RegulationConfig& config);

/// Cosine similarity of two latents.
double semantic_similarity(std::span<const double> zi, std::span<const double> zj);

/// 1 iff similarity >= eta[depth-1].
int relaxation_gate(double similarity, std::int64_t depth,
                    const std::vector<double>& eta);

/// Fills load = number of records sharing each record's signature.
void collision_loads(std::vector<OverlapRecord>& records);

/// 1 + (f_max - 1) * (min(load, d_max)/d_max)^alpha, saturating at f_max.
double load_scale(std::int64_t load, const RegulationConfig& config);

/// m_base * depth / L.
double depth_margin(std::int64_t depth, double m_base, std::int64_t L);

/// Fills similarity, gate, load, scale, and margin on every record.
/// With enable_sear off all gates are 0; with enable_las off all scales are 1.
void finalize_records(std::vector<OverlapRecord>& records, const Matrix& z,
                      const RegulationConfig& config, std::int64_t L,
                      bool enable_sear, bool enable_las);

/// Sum over records of scale * (1 - gate) * max(0, margin - (1 - cos)).
/// Fills each record's penalty. When grad_z is non-null, accumulates the
/// unweighted loss gradient into it for active records.
double adaptive_collision_loss(const Matrix& z,
                               std::vector<OverlapRecord>& records,
                               Matrix* grad_z);

}  // namespace adasid

#endif  // ADASID_OVERLAP_HPP
