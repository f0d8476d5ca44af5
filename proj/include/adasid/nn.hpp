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

#ifndef ADASID_NN_HPP
#define ADASID_NN_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "adasid/matrix.hpp"
#include "adasid/rng.hpp"

namespace adasid {

/// Trainable tensor with its accumulated gradient and Adam moments.
/// Values live on the float32 grid (snap_to_f32 after every mutation) so
/// checkpoints round-trip bit-exactly through the float32 wire format.
struct Parameter {
  Parameter() = default;
  Parameter(std::string name, std::int64_t rows, std::int64_t cols);

  std::string name;
  Matrix value;
  Matrix gradient;
  Matrix moment1;
  Matrix moment2;

  void snap_to_f32();
  void zero_grad() { gradient.fill(0.0); }
};

/// y = x W + b with a one-shot input tape for the backward pass.
class AffineLayer {
 public:
  AffineLayer() = default;
  AffineLayer(const std::string& name, std::int64_t in_dim, std::int64_t out_dim);

  void init(RngState& rng, double scale);

  /// Records the input for backward. One forward per backward.
  Matrix forward(const Matrix& input);
  /// Pure evaluation; does not touch the tape.
  Matrix apply(const Matrix& input) const;
  /// Accumulates dW, db and returns the gradient w.r.t. the input.
  /// Clears the tape.
  Matrix backward(const Matrix& output_grad);

  Parameter& weight() { return weight_; }
  Parameter& bias() { return bias_; }
  const Parameter& weight() const { return weight_; }
  const Parameter& bias() const { return bias_; }

 private:
  Parameter weight_;  // in_dim x out_dim
  Parameter bias_;    // 1 x out_dim
  Matrix taped_input_;
  bool has_tape_ = false;
};

/// Two affine layers with a rectifier between them.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::string& name, std::int64_t in_dim, std::int64_t hidden_dim,
      std::int64_t out_dim);

  void init(RngState& rng);

  Matrix forward(const Matrix& input);
  Matrix apply(const Matrix& input) const;
  Matrix backward(const Matrix& output_grad);

  std::vector<Parameter*> parameters();
  std::vector<const Parameter*> parameters() const;

  std::int64_t in_dim() const { return in_dim_; }
  std::int64_t out_dim() const { return out_dim_; }

 private:
  std::int64_t in_dim_ = 0;
  std::int64_t out_dim_ = 0;
  AffineLayer layer1_;
  AffineLayer layer2_;
  Matrix relu_mask_;
  bool has_tape_ = false;
};

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Standard bias-corrected adaptive-moment update. step is 1-based.
/// Gradients are zeroed and values are re-snapped to the float32 grid.
void adam_step(const std::vector<Parameter*>& params, const AdamConfig& config,
               std::int64_t step);

}  // namespace adasid

#endif  // ADASID_NN_HPP
