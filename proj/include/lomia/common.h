// Copyright 2026 The Lomia Authors
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

#ifndef LOMIA_COMMON_H_
#define LOMIA_COMMON_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lomia {

// Index of a categorical level within its attribute's level list.
using Level = std::uint16_t;

// Placeholder for a cell the holder of a record does not know.
inline constexpr Level kUnknownLevel = std::numeric_limits<Level>::max();

using Seed = std::uint64_t;
using Rng = std::mt19937_64;

// All recoverable failures (bad input files, contract violations on public
// entry points) are reported with this type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mixes a parent seed with a stream index (splitmix64 finalizer) so that
// per-row / per-tree / per-stage generators are independent of scheduling.
constexpr Seed DeriveSeed(Seed parent, std::uint64_t stream) {
  std::uint64_t z = parent + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Named sub-streams, e.g. DeriveSeed(root, "synth").
Seed DeriveSeed(Seed parent, std::string_view label);

// 64-bit FNV-1a. Used for schema hashes and data fingerprints.
std::uint64_t Fnv1a(std::string_view bytes,
                    std::uint64_t state = 0xcbf29ce484222325ULL);

std::string HexU64(std::uint64_t v);

// Inverse-CDF draw from a discrete distribution given by (unnormalized,
// non-negative) weights. Returns the index of the drawn category.
std::size_t SampleCategorical(std::span<const double> weights, Rng& rng);

// Runs fn(i) for i in [0, n) on up to `workers` threads (0 = hardware
// concurrency). Each index must be independent; results are written by index
// so output never depends on the worker count.
void ParallelFor(std::size_t n, const std::function<void(std::size_t)>& fn,
                 unsigned workers = 0);

}  // namespace lomia

#endif  // LOMIA_COMMON_H_
