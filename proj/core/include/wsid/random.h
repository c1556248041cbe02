// wsid/random.h

// Copyright 2026  The wsid Authors

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

#ifndef WSID_RANDOM_H_
#define WSID_RANDOM_H_

#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace wsid {

/// Identifiers for independent random streams derived from one user seed.
enum class RngStream : std::uint64_t {
  kInit = 1,
  kShuffle = 2,
  kDropout = 3,
  kGenerate = 4,
  kHeldOut = 5,
};

/// SplitMix64 finalizer; used to derive well-mixed seeds for sub-streams.
std::uint64_t MixSeed(std::uint64_t x);

/// Seeded generator with platform-independent distributions.
///
/// The standard library distribution objects are implementation-defined, so
/// every variate here is computed directly from the raw 64-bit engine output.
/// Same seed means the same sequence on every conforming compiler.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(MixSeed(seed)) {}
  Rng(std::uint64_t seed, RngStream stream)
      : engine_(MixSeed(seed ^ MixSeed(static_cast<std::uint64_t>(stream)))) {}

  std::uint64_t NextU64() { return engine_(); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double Uniform();
  /// Uniform on [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  /// Uniform integer on [0, n); n must be positive.
  std::uint64_t UniformInt(std::uint64_t n);
  /// Standard normal (Marsaglia polar method).
  double Normal();
  bool Bernoulli(double p) { return Uniform() < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(UniformInt(i));
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace wsid

#endif  // WSID_RANDOM_H_
