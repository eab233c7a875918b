// Copyright 2026 the svmix authors
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

#ifndef SVMIX_RNG_HPP
#define SVMIX_RNG_HPP

#include <cstdint>

// Self-contained deterministic RNG. The standard <random> distributions are
// implementation-defined, which would tie reproducibility to a particular
// libstdc++; everything here is pinned down so a seed means the same draw
// sequence on every platform.

namespace svmix {

// splitmix64 finalizer; also used to derive child stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Stable combiner for (seed, tag, index...) stream derivation.
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);

// xoshiro256++ generator with pinned distributions on top.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1), 53-bit resolution.
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n), unbiased. n must be >= 1.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal via the Marsaglia polar method (second value discarded).
  double normal();
  // Gamma(shape, 1) via Marsaglia-Tsang, with the shape<1 boost.
  double gamma(double shape);
  // Beta(a, b) as Ga/(Ga+Gb).
  double beta(double a, double b);

  // Child stream fully determined by (original seed, tags); independent of
  // how many draws this instance has consumed.
  Rng child(std::uint64_t tag, std::uint64_t i = 0, std::uint64_t j = 0) const;
  std::uint64_t child_seed(std::uint64_t tag, std::uint64_t i = 0,
                           std::uint64_t j = 0) const;

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
};

// Stream tags used to derive independent substreams from one master seed.
// Values are arbitrary but frozen: changing them changes every derived
// stream, which would silently re-randomize all seeded outputs.
namespace streams {
inline constexpr std::uint64_t kPool = 0x01;
inline constexpr std::uint64_t kUtterance = 0x02;
inline constexpr std::uint64_t kTrain = 0x03;
inline constexpr std::uint64_t kTrials = 0x04;
inline constexpr std::uint64_t kOverlap = 0x05;
inline constexpr std::uint64_t kBatch = 0x06;
inline constexpr std::uint64_t kCrop = 0x07;
inline constexpr std::uint64_t kAugment = 0x08;
inline constexpr std::uint64_t kMixup = 0x09;
inline constexpr std::uint64_t kInit = 0x0a;
inline constexpr std::uint64_t kLambda = 0x0b;
}  // namespace streams

}  // namespace svmix

#endif  // SVMIX_RNG_HPP
