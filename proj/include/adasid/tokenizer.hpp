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

#ifndef ADASID_TOKENIZER_HPP
#define ADASID_TOKENIZER_HPP

#include <cstdint>
#include <vector>

#include "adasid/matrix.hpp"
#include "adasid/nn.hpp"
#include "adasid/rng.hpp"

namespace adasid {

struct TokenizerConfig {
  std::int64_t d_in = 768;
  std::int64_t d = 32;
  std::int64_t L = 3;
  std::int64_t K = 256;
  double beta_commit = 0.25;

  void validate() const;  // throws ConfigError
};

/// One quantization layer: K codewords of dimension d, trained by gradient.
struct Codebook {
  std::int64_t layer = 0;  // 1-based
  Parameter codewords;     // K x d
};

/// Discrete code path of one item plus its residual trajectory.
/// residuals row l holds r^(l); row 0 is the encoder latent z.
struct SemanticId {
  std::vector<std::int64_t> indices;  // length L, values in 0..K-1
  std::vector<double> quantized;      // zhat, length d
  Matrix residuals;                   // (L+1) x d
};

/// Everything the trainer mutates: encoder, decoder, codebooks, step
/// counter, generator state, and per-code usage bookkeeping.
struct ModelState {
  TokenizerConfig config;
  Mlp encoder;  // d_in -> 2d -> d
  Mlp decoder;  // d -> 2d -> d_in
  std::vector<Codebook> codebooks;
  std::int64_t step = 0;
  RngState rng;
  // last_used[l][k] = last step at which code k of layer l+1 was selected.
  std::vector<std::vector<std::int64_t>> last_used;

  static ModelState create(const TokenizerConfig& config, std::uint64_t seed);

  bool codebooks_ready() const;
  /// All trainable parameters in checkpoint order:
  /// encoder l1/l2, decoder l1/l2 (weight then bias), then codebooks 1..L.
  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;
};

/// z = f(x), pure evaluation (the trainer drives the taped forward itself).
Matrix encode(const Matrix& features, const ModelState& model);

/// xtilde = h(zhat), pure evaluation.
Matrix decode(const Matrix& quantized, const ModelState& model);

/// Nearest-codeword walk per layer; ties break to the lowest index.
std::vector<SemanticId> quantize(const Matrix& z,
                                 const std::vector<Codebook>& codebooks);

/// Stacks the quantized vectors of a batch into a B x d matrix.
Matrix quantized_matrix(const std::vector<SemanticId>& ids,
                        std::int64_t d);

/// Mean squared error over all entries.
double reconstruction_loss(const Matrix& x, const Matrix& x_tilde);

/// Per item and layer: ||sg(r^(l-1)) - q^(l)||^2 + beta*||r^(l-1) - sg(q^(l))||^2,
/// averaged over items. Both terms equal ||r^(l)||^2 in value; they differ
/// only in where gradients flow.
double rq_loss(const std::vector<SemanticId>& ids, double beta_commit);

/// Layer 1 by k-means over latents (k-means++ seeding, 10 Lloyd rounds),
/// each deeper layer over the residuals the previous layers leave behind.
std::vector<Codebook> init_codebooks(const Matrix& latents,
                                     const TokenizerConfig& config,
                                     RngState& rng);

}  // namespace adasid

#endif  // ADASID_TOKENIZER_HPP
