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

#ifndef ADASID_MATRIX_HPP
#define ADASID_MATRIX_HPP

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace adasid {

/// Dense row-major matrix of doubles. All training math runs in double;
/// values that cross a serialization boundary are quantized to float32
/// (see Parameter::snap_to_f32).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::int64_t rows, std::int64_t cols, double fill = 0.0);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  std::int64_t size() const { return rows_ * cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::int64_t r, std::int64_t c) { return data_[r * cols_ + c]; }
  double operator()(std::int64_t r, std::int64_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::int64_t r) {
    return std::span<double>(data_.data() + r * cols_, static_cast<std::size_t>(cols_));
  }
  std::span<const double> row(std::int64_t r) const {
    return std::span<const double>(data_.data() + r * cols_, static_cast<std::size_t>(cols_));
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  bool same_shape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool all_finite() const;

  void fill(double value);
  void add_scaled(const Matrix& other, double scale);  // *this += scale * other

 private:
  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<double> data_;
};

// C = A (m x k) * B (k x n)
Matrix matmul(const Matrix& a, const Matrix& b);
// C = A (m x k) * B^T, with B (n x k)
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// C = A^T * B, with A (k x m), B (k x n)
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// Adds a 1 x n bias row to every row of m (m is R x n).
void add_row_broadcast(Matrix& m, const Matrix& bias);
// 1 x n vector of column sums.
Matrix column_sums(const Matrix& m);

double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> v);
double squared_distance(std::span<const double> a, std::span<const double> b);

// Throws DimensionError with a contextual message when shapes differ.
void check_same_shape(const Matrix& a, const Matrix& b, const std::string& context);
// Throws NumericError when any entry is non-finite.
void check_finite(const Matrix& m, const std::string& context);

}  // namespace adasid

#endif  // ADASID_MATRIX_HPP
