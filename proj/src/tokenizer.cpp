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

#include "adasid/tokenizer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "adasid/error.hpp"

namespace adasid {

void TokenizerConfig::validate() const {
  if (d_in < 1) throw ConfigError("tokenizer.d_in must be >= 1");
  if (d < 1) throw ConfigError("tokenizer.d must be >= 1");
  if (L < 1) throw ConfigError("tokenizer.L must be >= 1");
  // Collision signatures are stored as 64-bit masks, one bit per layer.
  if (L > 64) throw ConfigError("tokenizer.L must be <= 64");
  if (K < 2) throw ConfigError("tokenizer.K must be >= 2");
  if (!(beta_commit >= 0.0)) throw ConfigError("tokenizer.beta_commit must be >= 0");
}

ModelState ModelState::create(const TokenizerConfig& config, std::uint64_t seed) {
  config.validate();
  ModelState m;
  m.config = config;
  m.rng = RngState(seed);
  m.encoder = Mlp("encoder", config.d_in, 2 * config.d, config.d);
  m.decoder = Mlp("decoder", config.d, 2 * config.d, config.d_in);
  m.encoder.init(m.rng);
  m.decoder.init(m.rng);
  m.codebooks.clear();
  m.last_used.assign(static_cast<std::size_t>(config.L),
                     std::vector<std::int64_t>(static_cast<std::size_t>(config.K), 0));
  return m;
}

bool ModelState::codebooks_ready() const {
  if (codebooks.size() != static_cast<std::size_t>(config.L)) return false;
  for (const Codebook& cb : codebooks) {
    if (cb.codewords.value.rows() != config.K) return false;
  }
  return true;
}

std::vector<Parameter*> ModelState::parameters() {
  std::vector<Parameter*> out = encoder.parameters();
  for (Parameter* p : decoder.parameters()) out.push_back(p);
  for (Codebook& cb : codebooks) out.push_back(&cb.codewords);
  return out;
}

std::vector<const Parameter*> ModelState::parameters() const {
  std::vector<const Parameter*> out = encoder.parameters();
  for (const Parameter* p : decoder.parameters()) out.push_back(p);
  for (const Codebook& cb : codebooks) out.push_back(&cb.codewords);
  return out;
}

Matrix encode(const Matrix& features, const ModelState& model) {
  if (features.cols() != model.config.d_in) {
    throw DimensionError("encode: feature width " + std::to_string(features.cols()) +
                         " does not match d_in " + std::to_string(model.config.d_in));
  }
  return model.encoder.apply(features);
}

Matrix decode(const Matrix& quantized, const ModelState& model) {
  if (quantized.cols() != model.config.d) {
    throw DimensionError("decode: input width " + std::to_string(quantized.cols()) +
                         " does not match d " + std::to_string(model.config.d));
  }
  return model.decoder.apply(quantized);
}

namespace {

// Nearest codeword by squared Euclidean distance; lowest index wins ties.
std::int64_t nearest_codeword(std::span<const double> residual, const Matrix& codewords) {
  std::int64_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 0; k < codewords.rows(); ++k) {
    const double d2 = squared_distance(residual, codewords.row(k));
    if (d2 < best_dist) {
      best_dist = d2;
      best = k;
    }
  }
  return best;
}

}  // namespace

std::vector<SemanticId> quantize(const Matrix& z,
                                 const std::vector<Codebook>& codebooks) {
  if (codebooks.empty()) {
    throw StateError("quantize called with no codebooks");
  }
  const std::int64_t L = static_cast<std::int64_t>(codebooks.size());
  const std::int64_t d = z.cols();
  for (const Codebook& cb : codebooks) {
    if (cb.codewords.value.rows() == 0) {
      throw StateError("quantize called with an empty codebook");
    }
    if (cb.codewords.value.cols() != d) {
      throw DimensionError("codebook width does not match latent dimension");
    }
  }

  std::vector<SemanticId> out(static_cast<std::size_t>(z.rows()));
  for (std::int64_t i = 0; i < z.rows(); ++i) {
    SemanticId& sid = out[static_cast<std::size_t>(i)];
    sid.indices.resize(static_cast<std::size_t>(L));
    sid.quantized.assign(static_cast<std::size_t>(d), 0.0);
    sid.residuals = Matrix(L + 1, d);
    for (std::int64_t c = 0; c < d; ++c) sid.residuals(0, c) = z(i, c);
    for (std::int64_t l = 0; l < L; ++l) {
      const Matrix& cw = codebooks[static_cast<std::size_t>(l)].codewords.value;
      const std::int64_t k = nearest_codeword(sid.residuals.row(l), cw);
      sid.indices[static_cast<std::size_t>(l)] = k;
      for (std::int64_t c = 0; c < d; ++c) {
        const double r = sid.residuals(l, c) - cw(k, c);
        if (!std::isfinite(r)) {
          throw NumericError("non-finite residual at layer " + std::to_string(l + 1));
        }
        sid.residuals(l + 1, c) = r;
        sid.quantized[static_cast<std::size_t>(c)] += cw(k, c);
      }
    }
  }
  return out;
}

Matrix quantized_matrix(const std::vector<SemanticId>& ids, std::int64_t d) {
  Matrix out(static_cast<std::int64_t>(ids.size()), d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    for (std::int64_t c = 0; c < d; ++c) {
      out(static_cast<std::int64_t>(i), c) = ids[i].quantized[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

double reconstruction_loss(const Matrix& x, const Matrix& x_tilde) {
  check_same_shape(x, x_tilde, "reconstruction_loss");
  double sum = 0.0;
  for (std::int64_t i = 0; i < x.size(); ++i) {
    const double diff = x.data()[i] - x_tilde.data()[i];
    sum += diff * diff;
  }
  return sum / static_cast<double>(x.size());
}

double rq_loss(const std::vector<SemanticId>& ids, double beta_commit) {
  if (ids.empty()) return 0.0;
  double sum = 0.0;
  for (const SemanticId& sid : ids) {
    const std::int64_t L = sid.residuals.rows() - 1;
    for (std::int64_t l = 1; l <= L; ++l) {
      sum += (1.0 + beta_commit) * squared_norm(sid.residuals.row(l));
    }
  }
  return sum / static_cast<double>(ids.size());
}

namespace {

// k-means++ seeding: each next center is drawn proportional to the squared
// distance to the closest center already chosen.
std::vector<std::int64_t> seed_centers(const Matrix& points, std::int64_t k,
                                       RngState& rng) {
  const std::int64_t n = points.rows();
  std::vector<std::int64_t> centers;
  centers.reserve(static_cast<std::size_t>(k));
  centers.push_back(static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n),
                         std::numeric_limits<double>::infinity());
  while (static_cast<std::int64_t>(centers.size()) < k) {
    const std::int64_t last = centers.back();
    double total = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double dist = squared_distance(points.row(i), points.row(last));
      if (dist < d2[static_cast<std::size_t>(i)]) d2[static_cast<std::size_t>(i)] = dist;
      total += d2[static_cast<std::size_t>(i)];
    }
    std::int64_t pick;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::int64_t i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (acc > u) {
          pick = i;
          break;
        }
      }
    } else {
      // All points coincide with some chosen center; any point works.
      pick = static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n)));
    }
    centers.push_back(pick);
  }
  return centers;
}

Matrix kmeans(const Matrix& points, std::int64_t k, RngState& rng) {
  const std::int64_t n = points.rows();
  const std::int64_t d = points.cols();
  const std::vector<std::int64_t> seeds = seed_centers(points, k, rng);
  Matrix centers(k, d);
  for (std::int64_t c = 0; c < k; ++c) {
    for (std::int64_t j = 0; j < d; ++j) {
      centers(c, j) = points(seeds[static_cast<std::size_t>(c)], j);
    }
  }

  constexpr int kLloydRounds = 10;
  std::vector<std::int64_t> assign(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  for (int round = 0; round < kLloydRounds; ++round) {
    for (std::int64_t i = 0; i < n; ++i) {
      assign[static_cast<std::size_t>(i)] = nearest_codeword(points.row(i), centers);
    }
    Matrix sums(k, d);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::int64_t i = 0; i < n; ++i) {
      const std::int64_t c = assign[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(c)];
      for (std::int64_t j = 0; j < d; ++j) sums(c, j) += points(i, j);
    }
    for (std::int64_t c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        // Empty cluster: re-seed from a random data point.
        const std::int64_t pick =
            static_cast<std::int64_t>(rng.uniform_int(static_cast<std::uint64_t>(n)));
        for (std::int64_t j = 0; j < d; ++j) centers(c, j) = points(pick, j);
      } else {
        const double inv = 1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
        for (std::int64_t j = 0; j < d; ++j) centers(c, j) = sums(c, j) * inv;
      }
    }
  }
  return centers;
}

}  // namespace

std::vector<Codebook> init_codebooks(const Matrix& latents,
                                     const TokenizerConfig& config,
                                     RngState& rng) {
  config.validate();
  if (latents.cols() != config.d) {
    throw DimensionError("init_codebooks: latent width does not match d");
  }
  if (latents.rows() < config.K) {
    throw DataError("init_codebooks: need at least K=" + std::to_string(config.K) +
                    " latents, got " + std::to_string(latents.rows()));
  }
  check_finite(latents, "init_codebooks latents");

  std::vector<Codebook> books;
  books.reserve(static_cast<std::size_t>(config.L));
  Matrix residuals = latents;
  for (std::int64_t l = 0; l < config.L; ++l) {
    Codebook cb;
    cb.layer = l + 1;
    cb.codewords = Parameter("codebook." + std::to_string(l + 1), config.K, config.d);
    cb.codewords.value = kmeans(residuals, config.K, rng);
    cb.codewords.snap_to_f32();
    // Peel this layer off before fitting the next one.
    for (std::int64_t i = 0; i < residuals.rows(); ++i) {
      const std::int64_t k = nearest_codeword(residuals.row(i), cb.codewords.value);
      for (std::int64_t j = 0; j < config.d; ++j) {
        residuals(i, j) -= cb.codewords.value(k, j);
      }
    }
    books.push_back(std::move(cb));
  }
  return books;
}

}  // namespace adasid
