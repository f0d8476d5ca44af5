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

#include "adasid/rng.hpp"

#include <cmath>

namespace adasid {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t RngState::next_u64() {
  // Mixing the seed first decorrelates streams whose counters overlap.
  const std::uint64_t out = splitmix64(splitmix64(seed_) + position_);
  ++position_;
  return out;
}

double RngState::uniform() {
  // 53 random bits scaled into [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t RngState::uniform_int(std::uint64_t n) {
  if (n <= 1) {
    if (n == 1) next_u64();
    return 0;
  }
  // Multiply-shift map of one 64-bit draw onto [0, n). The modulo bias is
  // below 2^-64 per call, which is irrelevant next to determinism here.
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

double RngState::normal() {
  // Box-Muller with a fixed two-draw budget so the stream position advances
  // by exactly 2 regardless of the values drawn.
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return r * std::cos(kTwoPi * u2);
}

RngState RngState::fork(std::uint64_t stream) const {
  return RngState(splitmix64(seed_ ^ splitmix64(stream + 0x5851f42d4c957f2dULL)));
}

}  // namespace adasid
