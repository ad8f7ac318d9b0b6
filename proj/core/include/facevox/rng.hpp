// facevox/rng.hpp

// Copyright 2026  FaceVox Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef FACEVOX_RNG_HPP_
#define FACEVOX_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace facevox {

// Seeded random source with fixed draw algorithms.  std::mt19937_64 output is
// pinned by the standard, but std::*_distribution is not, so uniform and
// normal draws are generated here explicitly: that makes every seeded
// training run byte-identical no matter the standard library build.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Standard normal via Box-Muller; draws two uniforms per call.
  double Normal() {
    double u1 = Uniform();
    while (u1 <= 0.0) u1 = Uniform();
    const double u2 = Uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n).  Rejection-free modulo is fine here: n is
  // always tiny relative to 2^64, the bias is immaterial and deterministic.
  uint64_t Below(uint64_t n) { return engine_() % n; }

  // Bernoulli draw with success probability p.
  bool Flip(double p) { return Uniform() < p; }

  // Fisher-Yates shuffle of indices 0..n-1.
  std::vector<int> Permutation(int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = n - 1; i > 0; --i) {
      const int j = static_cast<int>(Below(static_cast<uint64_t>(i) + 1));
      std::swap(idx[i], idx[j]);
    }
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace facevox

#endif  // FACEVOX_RNG_HPP_
