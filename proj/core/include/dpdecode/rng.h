// Copyright 2026 The dpdecode Authors.
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

#ifndef DPDECODE_RNG_H_
#define DPDECODE_RNG_H_

#include <cstdint>
#include <random>

namespace dpdecode {

// Seeded 64-bit generator. Every draw is a fixed function of the seed and the
// number of prior draws, on every platform: no std:: distributions are used.
// Split() derives an independent child stream from the seed alone, so child
// streams do not depend on how much of the parent has been consumed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double Uniform01();
  // Standard exponential, mean 1.
  double Exponential();

  Rng Split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// One step of the splitmix64 finalizer.
std::uint64_t MixBits(std::uint64_t x);

}  // namespace dpdecode

#endif  // DPDECODE_RNG_H_
