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

#ifndef ADASID_TRAINER_HPP
#define ADASID_TRAINER_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "adasid/data.hpp"
#include "adasid/nn.hpp"
#include "adasid/overlap.hpp"
#include "adasid/schedule.hpp"
#include "adasid/sid_table.hpp"
#include "adasid/tokenizer.hpp"

namespace adasid {

struct TrainConfig {
  TokenizerConfig tokenizer;
  RegulationConfig regulation;
  ScheduleConfig schedule;
  AdamConfig adam;
  double temperature = 0.07;
  std::int64_t batch_size = 256;
  std::int64_t total_steps = 200000;
  std::uint64_t seed = 1;
  // Ablation switches: semantic-adaptive relaxation, load-adaptive
  // strengthening, progress-adaptive rebalancing.
  bool enable_sear = true;
  bool enable_las = true;
  bool enable_par = true;
  // A code unused for this many steps is re-seeded from a current residual;
  // 0 disables the refresh.
  std::int64_t dead_code_refresh_steps = 0;

  void validate() const;  // throws ConfigError
};

/// Per-step objective decomposition. The invariant
/// total = rec + rq + lambda_col*col_ada + lambda_cf*cf holds exactly as
/// written (same expression, same order).
struct LossBreakdown {
  std::int64_t step = 0;
  double rec = 0.0;
  double rq = 0.0;
  double col_ada = 0.0;
  double cf = 0.0;
  double lambda_col = 1.0;
  double lambda_cf = 0.0;
  double total = 0.0;
  std::int64_t active_pairs = 0;  // non-gated records inside the margin
  std::int64_t gated_pairs = 0;   // records relaxed by the gate
};

/// Optional per-step observation for tests and analysis tools: the
/// finalized overlap records, schedule position, and the batch snapshot.
struct StepDetails {
  double tau = 0.0;
  std::vector<std::int64_t> batch_rows;  // 2B corpus rows, triggers first
  std::vector<OverlapRecord> records;
  std::vector<SemanticId> sids;  // 2B entries
  Matrix z;                      // 2B x d encoder latents
};

class Trainer {
 public:
  Trainer(const TrainConfig& config, const ItemFeatureTable& corpus,
          const PairList& pairs);

  /// Builds the model and seeds the codebooks by k-means over the encoded
  /// corpus. Must run before any step.
  void initialize();

  /// Forward pass, all four losses, and gradient accumulation into the
  /// model parameters; no optimizer update. Exposed so gradients can be
  /// verified against finite differences.
  LossBreakdown compute_losses_and_grads(const PairBatch& batch, std::int64_t t,
                                         StepDetails* details);

  /// One full optimization step (losses, gradients, Adam, usage
  /// bookkeeping, optional dead-code refresh).
  LossBreakdown step(const PairBatch& batch, StepDetails* details = nullptr);

  /// Runs total_steps steps with deterministic per-epoch batch order.
  void run(const std::function<void(const LossBreakdown&)>& log_cb,
           const std::function<void(const LossBreakdown&, const StepDetails&)>&
               observe_cb = nullptr);

  ModelState& model() { return model_; }
  const ModelState& model() const { return model_; }
  const TrainConfig& config() const { return config_; }

 private:
  void refresh_dead_codes();

  TrainConfig config_;
  const ItemFeatureTable& corpus_;
  const PairList& pairs_;
  ModelState model_;
  std::vector<SemanticId> last_sids_;  // latest batch, for usage bookkeeping
  bool initialized_ = false;
};

/// Deterministic SIDs for every corpus item under a frozen model.
SidTable encode_corpus(const ModelState& model, const ItemFeatureTable& table);

/// Encoder latents for every corpus row, computed in fixed-size chunks.
Matrix encode_all(const ModelState& model, const ItemFeatureTable& table);

/// Checkpoint file: magic + version, a JSON header (config, step counter,
/// generator state), then raw little-endian float32 parameter blobs in
/// ModelState::parameters() order.
void save_checkpoint(const ModelState& state, const TrainConfig& config,
                     const std::string& path);

struct LoadedCheckpoint {
  TrainConfig config;
  ModelState state;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace adasid

#endif  // ADASID_TRAINER_HPP
