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

#ifndef ADASID_COLLABORATIVE_HPP
#define ADASID_COLLABORATIVE_HPP

#include "adasid/matrix.hpp"

namespace adasid {

/// Symmetric InfoNCE over cosine logits divided by temperature. Row i of
/// each block is one trigger/target pair; the other B-1 rows are negatives.
/// Averaged over both directions and over rows. When grad_tr/grad_ta are
/// non-null, accumulates the loss gradient into them.
double infonce_loss(const Matrix& z_tr, const Matrix& z_ta, double temperature,
                    Matrix* grad_tr, Matrix* grad_ta);

/// Cosine similarity matrix S with S(i, j) = cos(z_tr row i, z_ta row j).
/// Exposed for direct inspection in tests and diagnostics.
Matrix cosine_similarity_matrix(const Matrix& z_tr, const Matrix& z_ta);

}  // namespace adasid

#endif  // ADASID_COLLABORATIVE_HPP
