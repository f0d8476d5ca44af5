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

#include "adasid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <json.hpp>

#include "adasid/error.hpp"

namespace adasid {
namespace {

void require_nonempty(const SidTable& table, const char* op) {
  if (table.rows.empty()) {
    throw DataError(std::string(op) + ": empty SID table");
  }
}

double entropy_of_counts(const std::map<std::vector<std::int64_t>, std::int64_t>& counts,
                         std::int64_t total) {
  double h = 0.0;
  for (const auto& [key, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

std::map<std::vector<std::int64_t>, std::int64_t> layer_counts(
    const SidTable& table, std::int64_t layer) {
  if (layer < 1 || layer > table.L) {
    throw StateError("layer " + std::to_string(layer) + " outside 1.." +
                     std::to_string(table.L));
  }
  std::map<std::vector<std::int64_t>, std::int64_t> counts;
  for (const SidRow& row : table.rows) {
    ++counts[{row.indices[static_cast<std::size_t>(layer - 1)]}];
  }
  return counts;
}

// Shortest round-trip decimal text for a double.
std::string fmt(double v) { return nlohmann::json(v).dump(); }

}  // namespace

double sid_entropy(const SidTable& table) {
  require_nonempty(table, "sid_entropy");
  std::map<std::vector<std::int64_t>, std::int64_t> counts;
  for (const SidRow& row : table.rows) ++counts[row.indices];
  return entropy_of_counts(counts, static_cast<std::int64_t>(table.rows.size()));
}

double layer_perplexity(const SidTable& table, std::int64_t layer) {
  require_nonempty(table, "layer_perplexity");
  const auto counts = layer_counts(table, layer);
  return std::exp(
      entropy_of_counts(counts, static_cast<std::int64_t>(table.rows.size())));
}

double top1_load(const SidTable& table, std::int64_t layer) {
  require_nonempty(table, "top1_load");
  const auto counts = layer_counts(table, layer);
  std::int64_t top = 0;
  for (const auto& [key, c] : counts) top = std::max(top, c);
  return static_cast<double>(top) / static_cast<double>(table.rows.size());
}

DiagnosticsReport codebook_report(const SidTable& table) {
  require_nonempty(table, "codebook_report");
  DiagnosticsReport report;
  report.corpus_size = static_cast<std::int64_t>(table.rows.size());
  report.sid_entropy = sid_entropy(table);
  double sum_ppl = 0.0;
  double sum_top1 = 0.0;
  double min_ppl = 0.0;
  for (std::int64_t l = 1; l <= table.L; ++l) {
    const double ppl = layer_perplexity(table, l);
    report.layer_perplexities.push_back(ppl);
    sum_ppl += ppl;
    sum_top1 += top1_load(table, l);
    min_ppl = (l == 1) ? ppl : std::min(min_ppl, ppl);
  }
  report.avg_perplexity = sum_ppl / static_cast<double>(table.L);
  report.min_perplexity = min_ppl;
  report.mean_top1_load = sum_top1 / static_cast<double>(table.L);
  return report;
}

void export_landscape(
    const std::vector<std::pair<std::string, DiagnosticsReport>>& reports,
    const std::string& path) {
  if (reports.empty()) {
    throw DataError("export_landscape: no reports");
  }
  double top1_lo = reports[0].second.mean_top1_load;
  double top1_hi = top1_lo;
  double ppl_lo = reports[0].second.min_perplexity;
  double ppl_hi = ppl_lo;
  for (const auto& [name, r] : reports) {
    top1_lo = std::min(top1_lo, r.mean_top1_load);
    top1_hi = std::max(top1_hi, r.mean_top1_load);
    ppl_lo = std::min(ppl_lo, r.min_perplexity);
    ppl_hi = std::max(ppl_hi, r.min_perplexity);
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out << "name,sid_entropy,avg_ppl,min_ppl,mean_top1,inv_norm_top1,norm_min_ppl\n";
  for (const auto& [name, r] : reports) {
    const double inv_norm_top1 =
        (top1_hi > top1_lo)
            ? 1.0 - (r.mean_top1_load - top1_lo) / (top1_hi - top1_lo)
            : 1.0;
    const double norm_min_ppl =
        (ppl_hi > ppl_lo) ? (r.min_perplexity - ppl_lo) / (ppl_hi - ppl_lo) : 1.0;
    out << name << ',' << fmt(r.sid_entropy) << ',' << fmt(r.avg_perplexity) << ','
        << fmt(r.min_perplexity) << ',' << fmt(r.mean_top1_load) << ','
        << fmt(inv_norm_top1) << ',' << fmt(norm_min_ppl) << '\n';
  }
  if (!out) {
    throw IoError("write failure on " + path);
  }
}

}  // namespace adasid
