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

#include "adasid/trainer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "adasid/collaborative.hpp"
#include "adasid/config.hpp"
#include "adasid/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoints store raw little-endian float32 blobs");

namespace adasid {

void TrainConfig::validate() const {
  tokenizer.validate();
  regulation.validate(tokenizer.L);
  schedule.validate();
  if (!(temperature > 0.0)) throw ConfigError("train.temperature must be > 0");
  if (batch_size < 2) throw ConfigError("train.batch_size must be >= 2");
  if (total_steps < 0) throw ConfigError("train.total_steps must be >= 0");
  if (dead_code_refresh_steps < 0) {
    throw ConfigError("train.dead_code_refresh_steps must be >= 0");
  }
  if (!(adam.lr > 0.0)) throw ConfigError("train.lr must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) {
    throw ConfigError("train.beta1 must be in [0, 1)");
  }
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw ConfigError("train.beta2 must be in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw ConfigError("train.eps must be > 0");
}

Trainer::Trainer(const TrainConfig& config, const ItemFeatureTable& corpus,
                 const PairList& pairs)
    : config_(config), corpus_(corpus), pairs_(pairs) {}

void Trainer::initialize() {
  config_.validate();
  if (corpus_.dim != config_.tokenizer.d_in) {
    throw DimensionError("corpus dim " + std::to_string(corpus_.dim) +
                         " does not match tokenizer.d_in " +
                         std::to_string(config_.tokenizer.d_in));
  }
  model_ = ModelState::create(config_.tokenizer, config_.seed);
  const Matrix latents = encode_all(model_, corpus_);
  model_.codebooks = init_codebooks(latents, config_.tokenizer, model_.rng);
  initialized_ = true;
}

LossBreakdown Trainer::compute_losses_and_grads(const PairBatch& batch,
                                                std::int64_t t,
                                                StepDetails* details) {
  if (!initialized_) {
    throw StateError("trainer used before initialize()");
  }
  const std::int64_t B = static_cast<std::int64_t>(batch.trigger_rows.size());
  if (B < 1 || batch.target_rows.size() != batch.trigger_rows.size()) {
    throw DimensionError("pair batch sides must be nonempty and equal length");
  }
  const std::int64_t n = 2 * B;  // triggers then targets, one joint batch
  const std::int64_t d_in = config_.tokenizer.d_in;
  const std::int64_t d = config_.tokenizer.d;
  const std::int64_t L = config_.tokenizer.L;

  Matrix x(n, d_in);
  for (std::int64_t k = 0; k < B; ++k) {
    const std::int64_t tr = batch.trigger_rows[static_cast<std::size_t>(k)];
    const std::int64_t ta = batch.target_rows[static_cast<std::size_t>(k)];
    for (std::int64_t c = 0; c < d_in; ++c) {
      x(k, c) = corpus_.rows(tr, c);
      x(B + k, c) = corpus_.rows(ta, c);
    }
  }

  const double tau = config_.enable_par ? progress(t, config_.schedule) : 0.5;
  const ObjectiveWeights w = objective_weights(tau, config_.schedule);

  Matrix z = model_.encoder.forward(x);
  check_finite(z, "encoder output");
  std::vector<SemanticId> sids = quantize(z, model_.codebooks);
  const Matrix z_hat = quantized_matrix(sids, d);
  const Matrix x_tilde = model_.decoder.forward(z_hat);

  const double rec = reconstruction_loss(x, x_tilde);
  const double rq = rq_loss(sids, config_.tokenizer.beta_commit);

  std::vector<std::pair<std::int64_t, std::int64_t>> positives;
  positives.reserve(static_cast<std::size_t>(B));
  for (std::int64_t k = 0; k < B; ++k) positives.emplace_back(k, B + k);
  std::vector<OverlapRecord> records =
      collect_overlap_pairs(sids, positives, config_.regulation);
  finalize_records(records, z, config_.regulation, L, config_.enable_sear,
                   config_.enable_las);
  Matrix col_grad(n, d);
  const double col = adaptive_collision_loss(z, records, &col_grad);

  Matrix z_hat_tr(B, d);
  Matrix z_hat_ta(B, d);
  for (std::int64_t k = 0; k < B; ++k) {
    for (std::int64_t c = 0; c < d; ++c) {
      z_hat_tr(k, c) = z_hat(k, c);
      z_hat_ta(k, c) = z_hat(B + k, c);
    }
  }
  Matrix cf_grad_tr(B, d);
  Matrix cf_grad_ta(B, d);
  const double cf = infonce_loss(z_hat_tr, z_hat_ta, config_.temperature,
                                 &cf_grad_tr, &cf_grad_ta);

  const double total = rec + rq + w.lambda_col * col + w.lambda_cf * cf;

  // Backward. Reconstruction gradient reaches z_hat through the decoder;
  // the straight-through estimator passes d loss / d z_hat to z unchanged,
  // so codebooks receive gradient only from the quantization objective.
  Matrix g_x_tilde(n, d_in);
  const double rec_scale = 2.0 / static_cast<double>(n * d_in);
  for (std::int64_t i = 0; i < g_x_tilde.size(); ++i) {
    g_x_tilde.data()[i] = rec_scale * (x_tilde.data()[i] - x.data()[i]);
  }
  Matrix g_z = model_.decoder.backward(g_x_tilde);
  for (std::int64_t k = 0; k < B; ++k) {
    for (std::int64_t c = 0; c < d; ++c) {
      g_z(k, c) += w.lambda_cf * cf_grad_tr(k, c);
      g_z(B + k, c) += w.lambda_cf * cf_grad_ta(k, c);
    }
  }
  g_z.add_scaled(col_grad, w.lambda_col);

  // Quantization objective: commitment term pulls the encoder toward the
  // chosen codewords, codeword term pulls codewords toward the residuals.
  const double enc_scale = 2.0 * config_.tokenizer.beta_commit / static_cast<double>(n);
  const double cw_scale = -2.0 / static_cast<double>(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const SemanticId& sid = sids[static_cast<std::size_t>(i)];
    for (std::int64_t l = 0; l < L; ++l) {
      const std::int64_t k = sid.indices[static_cast<std::size_t>(l)];
      Matrix& cw_grad = model_.codebooks[static_cast<std::size_t>(l)].codewords.gradient;
      for (std::int64_t c = 0; c < d; ++c) {
        const double r = sid.residuals(l + 1, c);
        g_z(i, c) += enc_scale * r;
        cw_grad(k, c) += cw_scale * r;
      }
    }
  }
  model_.encoder.backward(g_z);

  LossBreakdown out;
  out.step = t;
  out.rec = rec;
  out.rq = rq;
  out.col_ada = col;
  out.cf = cf;
  out.lambda_col = w.lambda_col;
  out.lambda_cf = w.lambda_cf;
  out.total = total;
  for (const OverlapRecord& rec_r : records) {
    if (rec_r.gate == 1) {
      ++out.gated_pairs;
    } else if (rec_r.penalty > 0.0) {
      ++out.active_pairs;
    }
  }

  last_sids_ = std::move(sids);
  if (details != nullptr) {
    details->tau = tau;
    details->batch_rows.clear();
    details->batch_rows.reserve(static_cast<std::size_t>(n));
    for (std::int64_t k = 0; k < B; ++k) {
      details->batch_rows.push_back(batch.trigger_rows[static_cast<std::size_t>(k)]);
    }
    for (std::int64_t k = 0; k < B; ++k) {
      details->batch_rows.push_back(batch.target_rows[static_cast<std::size_t>(k)]);
    }
    details->records = records;
    details->sids = last_sids_;
    details->z = z;
  }
  return out;
}

LossBreakdown Trainer::step(const PairBatch& batch, StepDetails* details) {
  const std::int64_t t = model_.step;
  try {
    const LossBreakdown out = compute_losses_and_grads(batch, t, details);
    adam_step(model_.parameters(), config_.adam, t + 1);
    model_.step = t + 1;

    for (const SemanticId& sid : last_sids_) {
      for (std::size_t l = 0; l < sid.indices.size(); ++l) {
        model_.last_used[l][static_cast<std::size_t>(sid.indices[l])] = model_.step;
      }
    }
    if (config_.dead_code_refresh_steps > 0) refresh_dead_codes();
    return out;
  } catch (const NumericError& e) {
    throw NumericError("step " + std::to_string(t) + ": " + e.what());
  }
}

void Trainer::refresh_dead_codes() {
  const std::int64_t n = static_cast<std::int64_t>(last_sids_.size());
  if (n == 0) return;
  for (std::size_t l = 0; l < model_.codebooks.size(); ++l) {
    Codebook& cb = model_.codebooks[l];
    for (std::int64_t k = 0; k < config_.tokenizer.K; ++k) {
      if (model_.step - model_.last_used[l][static_cast<std::size_t>(k)] <
          config_.dead_code_refresh_steps) {
        continue;
      }
      // Re-seed the dead code from the residual some current item feeds
      // into this layer, and restart its optimizer moments.
      const std::int64_t pick = static_cast<std::int64_t>(
          model_.rng.uniform_int(static_cast<std::uint64_t>(n)));
      const SemanticId& sid = last_sids_[static_cast<std::size_t>(pick)];
      for (std::int64_t c = 0; c < config_.tokenizer.d; ++c) {
        cb.codewords.value(k, c) =
            sid.residuals(static_cast<std::int64_t>(l), c);
        cb.codewords.moment1(k, c) = 0.0;
        cb.codewords.moment2(k, c) = 0.0;
      }
      model_.last_used[l][static_cast<std::size_t>(k)] = model_.step;
    }
    cb.codewords.snap_to_f32();
  }
}

void Trainer::run(const std::function<void(const LossBreakdown&)>& log_cb,
                  const std::function<void(const LossBreakdown&, const StepDetails&)>&
                      observe_cb) {
  if (!initialized_) initialize();
  std::int64_t done = 0;
  for (std::int64_t epoch = 0; done < config_.total_steps; ++epoch) {
    const std::vector<PairBatch> batches =
        batch_iter(pairs_, config_.batch_size, config_.seed, epoch);
    if (batches.empty()) {
      throw DataError("pair list yields no batches of at least 2 pairs");
    }
    for (const PairBatch& batch : batches) {
      if (done >= config_.total_steps) break;
      StepDetails details;
      const LossBreakdown lb = step(batch, observe_cb ? &details : nullptr);
      if (log_cb) log_cb(lb);
      if (observe_cb) observe_cb(lb, details);
      ++done;
    }
  }
}

Matrix encode_all(const ModelState& model, const ItemFeatureTable& table) {
  if (table.dim != model.config.d_in) {
    throw DimensionError("feature dim " + std::to_string(table.dim) +
                         " does not match model d_in " +
                         std::to_string(model.config.d_in));
  }
  constexpr std::int64_t kChunk = 1024;
  Matrix out(table.count(), model.config.d);
  for (std::int64_t begin = 0; begin < table.count(); begin += kChunk) {
    const std::int64_t end = std::min(table.count(), begin + kChunk);
    Matrix x(end - begin, table.dim);
    for (std::int64_t i = begin; i < end; ++i) {
      for (std::int64_t c = 0; c < table.dim; ++c) x(i - begin, c) = table.rows(i, c);
    }
    const Matrix z = model.encoder.apply(x);
    for (std::int64_t i = begin; i < end; ++i) {
      for (std::int64_t c = 0; c < model.config.d; ++c) out(i, c) = z(i - begin, c);
    }
  }
  return out;
}

SidTable encode_corpus(const ModelState& model, const ItemFeatureTable& table) {
  if (!model.codebooks_ready()) {
    throw StateError("encode_corpus: codebooks not initialized");
  }
  if (table.dim != model.config.d_in) {
    throw DimensionError("feature dim " + std::to_string(table.dim) +
                         " does not match model d_in " +
                         std::to_string(model.config.d_in));
  }
  constexpr std::int64_t kChunk = 1024;
  SidTable out;
  out.L = model.config.L;
  out.rows.reserve(static_cast<std::size_t>(table.count()));
  for (std::int64_t begin = 0; begin < table.count(); begin += kChunk) {
    const std::int64_t end = std::min(table.count(), begin + kChunk);
    Matrix x(end - begin, table.dim);
    for (std::int64_t i = begin; i < end; ++i) {
      for (std::int64_t c = 0; c < table.dim; ++c) x(i - begin, c) = table.rows(i, c);
    }
    const Matrix z = model.encoder.apply(x);
    const std::vector<SemanticId> sids = quantize(z, model.codebooks);
    for (std::int64_t i = begin; i < end; ++i) {
      SidRow row;
      row.id = table.ids[static_cast<std::size_t>(i)];
      row.indices = sids[static_cast<std::size_t>(i - begin)].indices;
      out.rows.push_back(std::move(row));
    }
  }
  return out;
}

namespace {

constexpr char kMagic[8] = {'A', 'D', 'A', 'S', 'I', 'D', 'C', 'K'};
constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const ModelState& state, const TrainConfig& config,
                     const std::string& path) {
  nlohmann::json header;
  header["config"] = train_config_to_json(config);
  header["step"] = state.step;
  header["rng"]["seed"] = state.rng.seed();
  header["rng"]["position"] = state.rng.position();
  const std::string header_text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("cannot open " + path + " for writing");
  }
  out.write(kMagic, sizeof(kMagic));
  const std::uint32_t version = kCheckpointVersion;
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  const std::uint64_t header_len = header_text.size();
  out.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
  out.write(header_text.data(), static_cast<std::streamsize>(header_text.size()));

  std::vector<float> buf;
  for (const Parameter* p : state.parameters()) {
    buf.resize(static_cast<std::size_t>(p->value.size()));
    for (std::size_t i = 0; i < buf.size(); ++i) {
      buf[i] = static_cast<float>(p->value.data()[i]);
    }
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
  }
  if (!out) {
    throw IoError("write failure on " + path);
  }
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("cannot open checkpoint " + path);
  }
  char magic[sizeof(kMagic)];
  in.read(magic, sizeof(magic));
  if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw DataError(path + ": not a checkpoint file (bad magic)");
  }
  std::uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (in.gcount() != sizeof(version) || version != kCheckpointVersion) {
    throw DataError(path + ": unsupported checkpoint version " +
                    std::to_string(version));
  }
  std::uint64_t header_len = 0;
  in.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  if (in.gcount() != sizeof(header_len) || header_len > (1ULL << 30)) {
    throw DataError(path + ": corrupt checkpoint header length");
  }
  std::string header_text(header_len, '\0');
  in.read(header_text.data(), static_cast<std::streamsize>(header_len));
  if (static_cast<std::uint64_t>(in.gcount()) != header_len) {
    throw DataError(path + ": truncated checkpoint header");
  }
  const nlohmann::json header = nlohmann::json::parse(header_text, nullptr, false);
  if (header.is_discarded() || !header.is_object() || !header.contains("config") ||
      !header.contains("step") || !header.contains("rng") ||
      !header["step"].is_number_integer() || !header["rng"].is_object() ||
      !header["rng"].contains("seed") || !header["rng"].contains("position")) {
    throw DataError(path + ": corrupt checkpoint header");
  }

  LoadedCheckpoint ckpt;
  try {
    ckpt.config = train_config_from_json(header["config"]);
    ckpt.config.validate();
  } catch (const UsageError& e) {
    throw DataError(path + ": corrupt checkpoint config: " + e.what());
  }

  ckpt.state = ModelState::create(ckpt.config.tokenizer, ckpt.config.seed);
  ckpt.state.step = header["step"].get<std::int64_t>();
  ckpt.state.rng = RngState::restore(header["rng"]["seed"].get<std::uint64_t>(),
                                     header["rng"]["position"].get<std::uint64_t>());
  ckpt.state.codebooks.clear();
  for (std::int64_t l = 0; l < ckpt.config.tokenizer.L; ++l) {
    Codebook cb;
    cb.layer = l + 1;
    cb.codewords = Parameter("codebook." + std::to_string(l + 1),
                             ckpt.config.tokenizer.K, ckpt.config.tokenizer.d);
    ckpt.state.codebooks.push_back(std::move(cb));
  }

  std::vector<float> buf;
  for (Parameter* p : ckpt.state.parameters()) {
    buf.resize(static_cast<std::size_t>(p->value.size()));
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (in.gcount() != static_cast<std::streamsize>(buf.size() * sizeof(float))) {
      throw DataError(path + ": truncated checkpoint (parameter " + p->name + ")");
    }
    for (std::size_t i = 0; i < buf.size(); ++i) {
      if (!std::isfinite(buf[i])) {
        throw DataError(path + ": non-finite value in parameter " + p->name);
      }
      p->value.data()[i] = static_cast<double>(buf[i]);
    }
  }
  if (in.peek() != std::ifstream::traits_type::eof()) {
    throw DataError(path + ": trailing bytes after parameter blobs");
  }
  // A loaded model should not treat every code as instantly stale.
  for (auto& layer : ckpt.state.last_used) {
    std::fill(layer.begin(), layer.end(), ckpt.state.step);
  }
  return ckpt;
}

}  // namespace adasid
