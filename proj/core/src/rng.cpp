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

#include "infostat/rng.hpp"

#include <cmath>
#include <numbers>

namespace infostat {

std::uint64_t SplitMix64::below(std::uint64_t bound) {
  if (bound <= 1) return 0;
  // Largest multiple of bound that fits; draws above it are rejected.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

double SplitMix64::normal() {
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double SplitMix64::truncated_normal(double stddev) {
  double z;
  do {
    z = normal();
  } while (std::abs(z) > 2.0);
  return z * stddev;
}

double keyed_uniform(std::uint64_t k0, std::uint64_t k1, std::uint64_t k2,
                     std::uint64_t k3, std::uint64_t k4) {
  std::uint64_t h = SplitMix64::mix(k0 + 0x9e3779b97f4a7c15ULL);
  h = SplitMix64::mix(h ^ (k1 + 0x632be59bd9b4e019ULL));
  h = SplitMix64::mix(h ^ (k2 + 0x8cb92ba72f3d8dd7ULL));
  h = SplitMix64::mix(h ^ (k3 + 0xd6e8feb86659fd93ULL));
  h = SplitMix64::mix(h ^ (k4 + 0xa0761d6478bd642fULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace infostat
