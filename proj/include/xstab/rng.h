// Copyright 2026 The xstab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef XSTAB_RNG_H_
#define XSTAB_RNG_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace xstab {

// Every random draw in the toolkit goes through these helpers so that a
// (seed, input) pair yields the same bytes on every platform and standard
// library. std::uniform_int_distribution and friends are
// implementation-defined and are not used.

std::uint64_t SplitMix64(std::uint64_t x);

// FNV-1a over the bytes of `s`, finalized with SplitMix64.
std::uint64_t HashString(std::string_view s);

// Order-sensitive combination of 64-bit values.
std::uint64_t HashCombine(std::uint64_t seed, std::uint64_t value);

// xoshiro256** seeded through SplitMix64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t Next();
  // Uniform on [0, bound). bound must be positive. Unbiased (rejection).
  std::uint64_t UniformIndex(std::uint64_t bound);
  // Uniform on [0, 1) with 53 random bits.
  double UniformDouble();
  bool Bernoulli(double p) { return UniformDouble() < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(UniformIndex(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  // k distinct indices from [0, n), in draw order. k is clamped to n.
  std::vector<std::size_t> SampleWithoutReplacement(std::size_t n,
                                                    std::size_t k);

 private:
  std::uint64_t s_[4];
};

}  // namespace xstab

#endif  // XSTAB_RNG_H_
