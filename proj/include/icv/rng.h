// Copyright 2026 The ICV Lab Authors
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

#ifndef ICV_RNG_H_
#define ICV_RNG_H_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace icv {

// Seed-derivation purposes. Each stream is keyed by (run seed, episode, t,
// purpose) so results do not depend on evaluation order.
enum class StreamPurpose : std::uint64_t {
  kRollout = 1,
  kOrder = 2,
  kTraining = 3,
  kSampling = 4,
  kInitial = 5,
  kVerify = 6,
};

inline std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t DeriveSeed(std::uint64_t run_seed,
                                std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = SplitMix64(run_seed);
  for (std::uint64_t p : parts) h = SplitMix64(h ^ SplitMix64(p + 0x51ED27ULL));
  return h;
}

// Thin wrapper over mt19937_64 with distribution code that does not depend on
// the standard library's (implementation-defined) distribution classes.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng ForStream(std::uint64_t run_seed, std::uint64_t episode,
                       std::uint64_t t, StreamPurpose purpose,
                       std::uint64_t extra = 0) {
    return Rng(DeriveSeed(run_seed, {episode, t,
                                     static_cast<std::uint64_t>(purpose),
                                     extra}));
  }

  std::uint64_t NextU64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double Uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n).
  std::uint64_t Below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Index drawn from a categorical distribution; weights must sum to ~1.
  int Categorical(std::span<const double> probs) {
    const double u = Uniform();
    double acc = 0.0;
    int last_positive = 0;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] <= 0.0) continue;
      acc += probs[i];
      last_positive = i;
      if (u < acc) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace icv

#endif  // ICV_RNG_H_
