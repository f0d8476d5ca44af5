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

#ifndef ADASID_RNG_HPP
#define ADASID_RNG_HPP

#include <cstdint>
#include <vector>

namespace adasid {

/// Counter-based generator (splitmix64 over seed + position). The full state
/// is the (seed, position) pair, so it checkpoints as two integers and a
/// restored stream continues bit-exactly.
class RngState {
 public:
  explicit RngState(std::uint64_t seed = 0) : seed_(seed) {}
  static RngState restore(std::uint64_t seed, std::uint64_t position) {
    RngState r(seed);
    r.position_ = position;
    return r;
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t position() const { return position_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n), n >= 1.
  std::uint64_t uniform_int(std::uint64_t n);
  /// Standard normal draw; consumes exactly two raw outputs.
  double normal();

  /// Derives an independent stream (e.g. per epoch or per sweep point)
  /// without advancing this generator.
  RngState fork(std::uint64_t stream) const;

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (v.size() < 2) return;
    for (std::size_t i = v.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_int(i + 1));
      std::swap(v[i], v[j]);
    }
  }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t position_ = 0;
};

}  // namespace adasid

#endif  // ADASID_RNG_HPP
