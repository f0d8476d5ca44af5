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

#include "adasid/nn.hpp"

#include <cmath>

#include "adasid/error.hpp"

namespace adasid {

Parameter::Parameter(std::string param_name, std::int64_t rows, std::int64_t cols)
    : name(std::move(param_name)),
      value(rows, cols),
      gradient(rows, cols),
      moment1(rows, cols),
      moment2(rows, cols) {}

void Parameter::snap_to_f32() {
  for (double& v : value.data()) {
    v = static_cast<double>(static_cast<float>(v));
  }
}

AffineLayer::AffineLayer(const std::string& name, std::int64_t in_dim,
                         std::int64_t out_dim)
    : weight_(name + ".weight", in_dim, out_dim), bias_(name + ".bias", 1, out_dim) {}

void AffineLayer::init(RngState& rng, double scale) {
  for (double& v : weight_.value.data()) {
    v = scale * rng.normal();
  }
  bias_.value.fill(0.0);
  weight_.snap_to_f32();
  bias_.snap_to_f32();
}

Matrix AffineLayer::forward(const Matrix& input) {
  taped_input_ = input;
  has_tape_ = true;
  return apply(input);
}

Matrix AffineLayer::apply(const Matrix& input) const {
  check_finite(input, weight_.name + " input");
  Matrix out = matmul(input, weight_.value);
  add_row_broadcast(out, bias_.value);
  return out;
}

Matrix AffineLayer::backward(const Matrix& output_grad) {
  if (!has_tape_) {
    throw StateError("backward called without a recorded forward on " + weight_.name);
  }
  if (output_grad.rows() != taped_input_.rows() ||
      output_grad.cols() != weight_.value.cols()) {
    throw DimensionError("output gradient shape does not match " + weight_.name +
                         " forward output");
  }
  weight_.gradient.add_scaled(matmul_tn(taped_input_, output_grad), 1.0);
  bias_.gradient.add_scaled(column_sums(output_grad), 1.0);
  Matrix input_grad = matmul_nt(output_grad, weight_.value);
  taped_input_ = Matrix();
  has_tape_ = false;
  return input_grad;
}

Mlp::Mlp(const std::string& name, std::int64_t in_dim, std::int64_t hidden_dim,
         std::int64_t out_dim)
    : in_dim_(in_dim),
      out_dim_(out_dim),
      layer1_(name + ".l1", in_dim, hidden_dim),
      layer2_(name + ".l2", hidden_dim, out_dim) {}

void Mlp::init(RngState& rng) {
  // He-style fan-in scaling keeps rectifier activations well conditioned.
  layer1_.init(rng, std::sqrt(2.0 / static_cast<double>(in_dim_)));
  const std::int64_t hidden = layer1_.weight().value.cols();
  layer2_.init(rng, std::sqrt(2.0 / static_cast<double>(hidden)));
}

Matrix Mlp::forward(const Matrix& input) {
  Matrix hidden = layer1_.forward(input);
  relu_mask_ = Matrix(hidden.rows(), hidden.cols());
  for (std::int64_t i = 0; i < hidden.size(); ++i) {
    if (hidden.data()[i] > 0.0) {
      relu_mask_.data()[i] = 1.0;
    } else {
      hidden.data()[i] = 0.0;
    }
  }
  has_tape_ = true;
  return layer2_.forward(hidden);
}

Matrix Mlp::apply(const Matrix& input) const {
  Matrix hidden = layer1_.apply(input);
  for (double& v : hidden.data()) {
    if (v < 0.0) v = 0.0;
  }
  return layer2_.apply(hidden);
}

Matrix Mlp::backward(const Matrix& output_grad) {
  if (!has_tape_) {
    throw StateError("backward called without a recorded forward on mlp " +
                     layer1_.weight().name);
  }
  Matrix hidden_grad = layer2_.backward(output_grad);
  for (std::int64_t i = 0; i < hidden_grad.size(); ++i) {
    hidden_grad.data()[i] *= relu_mask_.data()[i];
  }
  relu_mask_ = Matrix();
  has_tape_ = false;
  return layer1_.backward(hidden_grad);
}

std::vector<Parameter*> Mlp::parameters() {
  return {&layer1_.weight(), &layer1_.bias(), &layer2_.weight(), &layer2_.bias()};
}

std::vector<const Parameter*> Mlp::parameters() const {
  return {&layer1_.weight(), &layer1_.bias(), &layer2_.weight(), &layer2_.bias()};
}

void adam_step(const std::vector<Parameter*>& params, const AdamConfig& config,
               std::int64_t step) {
  if (step < 1) {
    throw StateError("adam_step requires step >= 1");
  }
  const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
  for (Parameter* p : params) {
    if (!p->gradient.all_finite()) {
      throw NumericError("non-finite gradient in parameter " + p->name);
    }
    for (std::int64_t i = 0; i < p->value.size(); ++i) {
      const double g = p->gradient.data()[i];
      double& m1 = p->moment1.data()[i];
      double& m2 = p->moment2.data()[i];
      m1 = config.beta1 * m1 + (1.0 - config.beta1) * g;
      m2 = config.beta2 * m2 + (1.0 - config.beta2) * g * g;
      const double m1_hat = m1 / bc1;
      const double m2_hat = m2 / bc2;
      p->value.data()[i] -= config.lr * m1_hat / (std::sqrt(m2_hat) + config.eps);
    }
    p->snap_to_f32();
    p->zero_grad();
  }
}

}  // namespace adasid
