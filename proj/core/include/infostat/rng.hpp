// Copyright 2026 The infostat Authors.
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

#ifndef INFOSTAT_RNG_HPP_
#define INFOSTAT_RNG_HPP_

#include <cstdint>
#include <string_view>

namespace infostat {

// SplitMix64 (Steele, Lea & Flood 2014). Every random draw in the library
// goes through this generator so that corpora, initial weights, shuffles and
// dropout masks are identical across standard libraries and platforms.
//
//   state += 0x9e3779b97f4a7c15
//   z = state
//   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
//   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
//   return z ^ (z >> 31)
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound). Rejection sampling, so unbiased.
  std::uint64_t below(std::uint64_t bound);

  bool coin() { return (next() >> 63) != 0; }

  // Standard normal via Box-Muller (one value per call).
  double normal();

  // Normal(0, stddev) truncated to [-2 stddev, 2 stddev] by rejection.
  double truncated_normal(double stddev);

  // The SplitMix64 output finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// FNV-1a, 64-bit.
constexpr std::uint64_t fnv1a(std::string_view bytes,
                              std::uint64_t hash = 0xcbf29ce484222325ULL) {
  for (char c : bytes) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

// Counter-based uniform draw: a pure function of its key words. Used for
// dropout so that a mask depends only on (seed, step, site, example, element).
double keyed_uniform(std::uint64_t k0, std::uint64_t k1, std::uint64_t k2,
                     std::uint64_t k3, std::uint64_t k4);

}  // namespace infostat

#endif  // INFOSTAT_RNG_HPP_
