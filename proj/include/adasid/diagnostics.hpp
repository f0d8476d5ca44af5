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

#ifndef ADASID_DIAGNOSTICS_HPP
#define ADASID_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adasid/sid_table.hpp"

namespace adasid {

/// Code-space utilization statistics over one SID table.
struct DiagnosticsReport {
  double sid_entropy = 0.0;  // nats
  std::vector<double> layer_perplexities;
  double avg_perplexity = 0.0;
  double min_perplexity = 0.0;
  double mean_top1_load = 0.0;
  std::int64_t corpus_size = 0;
};

/// Shannon entropy (natural log) of the empirical distribution over
/// complete L-tuples.
double sid_entropy(const SidTable& table);

/// exp(entropy) of the code-usage distribution at one layer (1-based).
double layer_perplexity(const SidTable& table, std::int64_t layer);

/// Fraction of items assigned to the most frequent code at one layer.
double top1_load(const SidTable& table, std::int64_t layer);

DiagnosticsReport codebook_report(const SidTable& table);

/// Comma-separated landscape with raw statistics plus min-max-normalized
/// plot axes over the given set. A degenerate axis (singleton set or
/// max equal to min) normalizes to 1.0.
void export_landscape(
    const std::vector<std::pair<std::string, DiagnosticsReport>>& reports,
    const std::string& path);

}  // namespace adasid

#endif  // ADASID_DIAGNOSTICS_HPP
