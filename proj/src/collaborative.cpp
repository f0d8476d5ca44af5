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

#include "adasid/collaborative.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "adasid/error.hpp"

namespace adasid {
namespace {

// Row-normalizes m into unit vectors; returns the original row norms.
std::vector<double> normalize_rows(Matrix& m, const char* side) {
  std::vector<double> norms(static_cast<std::size_t>(m.rows()));
  for (std::int64_t i = 0; i < m.rows(); ++i) {
    const double n2 = squared_norm(m.row(i));
    if (n2 == 0.0) {
      throw NumericError(std::string("infonce_loss: zero-norm ") + side + " row " +
                         std::to_string(i));
    }
    const double n = std::sqrt(n2);
    norms[static_cast<std::size_t>(i)] = n;
    for (double& v : m.row(i)) v /= n;
  }
  return norms;
}

}  // namespace

Matrix cosine_similarity_matrix(const Matrix& z_tr, const Matrix& z_ta) {
  check_same_shape(z_tr, z_ta, "cosine_similarity_matrix");
  Matrix u = z_tr;
  Matrix v = z_ta;
  normalize_rows(u, "trigger");
  normalize_rows(v, "target");
  return matmul_nt(u, v);
}

double infonce_loss(const Matrix& z_tr, const Matrix& z_ta, double temperature,
                    Matrix* grad_tr, Matrix* grad_ta) {
  check_same_shape(z_tr, z_ta, "infonce_loss");
  if (!(temperature > 0.0)) {
    throw ConfigError("infonce_loss: temperature must be > 0");
  }
  check_finite(z_tr, "infonce_loss trigger block");
  check_finite(z_ta, "infonce_loss target block");

  const std::int64_t B = z_tr.rows();
  const std::int64_t d = z_tr.cols();
  Matrix u = z_tr;
  Matrix v = z_ta;
  const std::vector<double> u_norms = normalize_rows(u, "trigger");
  const std::vector<double> v_norms = normalize_rows(v, "target");

  // Logits = cosine / temperature.
  Matrix logits = matmul_nt(u, v);
  for (double& s : logits.data()) s /= temperature;

  // Row softmax (trigger -> target) and column softmax (target -> trigger),
  // both max-shifted for stability.
  Matrix row_p(B, B);
  Matrix col_q(B, B);
  double loss = 0.0;
  for (std::int64_t i = 0; i < B; ++i) {
    double mx = logits(i, 0);
    for (std::int64_t j = 1; j < B; ++j) mx = std::max(mx, logits(i, j));
    double denom = 0.0;
    for (std::int64_t j = 0; j < B; ++j) {
      row_p(i, j) = std::exp(logits(i, j) - mx);
      denom += row_p(i, j);
    }
    for (std::int64_t j = 0; j < B; ++j) row_p(i, j) /= denom;
    loss -= std::log(row_p(i, i));
  }
  for (std::int64_t j = 0; j < B; ++j) {
    double mx = logits(0, j);
    for (std::int64_t i = 1; i < B; ++i) mx = std::max(mx, logits(i, j));
    double denom = 0.0;
    for (std::int64_t i = 0; i < B; ++i) {
      col_q(i, j) = std::exp(logits(i, j) - mx);
      denom += col_q(i, j);
    }
    for (std::int64_t i = 0; i < B; ++i) col_q(i, j) /= denom;
    loss -= std::log(col_q(j, j));
  }
  loss /= 2.0 * static_cast<double>(B);

  if (grad_tr == nullptr && grad_ta == nullptr) return loss;
  if (grad_tr != nullptr) check_same_shape(z_tr, *grad_tr, "infonce_loss grad_tr");
  if (grad_ta != nullptr) check_same_shape(z_ta, *grad_ta, "infonce_loss grad_ta");

  // d loss / d logits, then chain through the cosine and row normalization.
  Matrix gs(B, B);
  const double scale = 1.0 / (2.0 * static_cast<double>(B) * temperature);
  for (std::int64_t i = 0; i < B; ++i) {
    for (std::int64_t j = 0; j < B; ++j) {
      double g = row_p(i, j) + col_q(i, j);
      if (i == j) g -= 2.0;
      gs(i, j) = scale * g;
    }
  }
  if (grad_tr != nullptr) {
    const Matrix gu = matmul(gs, v);  // d loss / d u_i
    for (std::int64_t i = 0; i < B; ++i) {
      const double proj = dot(gu.row(i), u.row(i));
      for (std::int64_t c = 0; c < d; ++c) {
        (*grad_tr)(i, c) +=
            (gu(i, c) - proj * u(i, c)) / u_norms[static_cast<std::size_t>(i)];
      }
    }
  }
  if (grad_ta != nullptr) {
    const Matrix gv = matmul_tn(gs, u);  // d loss / d v_j
    for (std::int64_t j = 0; j < B; ++j) {
      const double proj = dot(gv.row(j), v.row(j));
      for (std::int64_t c = 0; c < d; ++c) {
        (*grad_ta)(j, c) +=
            (gv(j, c) - proj * v(j, c)) / v_norms[static_cast<std::size_t>(j)];
      }
    }
  }
  return loss;
}

}  // namespace adasid
