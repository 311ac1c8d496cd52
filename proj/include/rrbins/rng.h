// Copyright 2026 The rrbins Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RRBINS_RNG_H_
#define RRBINS_RNG_H_

#include <cstdint>
#include <random>

namespace rrbins {

// Seeded 64-bit generator. Identical seeds give identical streams on every
// platform: all derived variates are computed here rather than through the
// implementation-defined std:: distributions.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double Uniform();
  // Uniform on {0, ..., n - 1}; n > 0.
  uint64_t UniformInt(uint64_t n);
  // Standard exponential variate.
  double Exponential();

  // Independent child stream for task `index`.
  Rng Split(uint64_t index) const { return Rng(SplitSeed(seed_, index)); }
  static uint64_t SplitSeed(uint64_t parent, uint64_t index);

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace rrbins

#endif  // RRBINS_RNG_H_
