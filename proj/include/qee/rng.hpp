// Copyright 2026 The qee Authors
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

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

namespace qee {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Named stream identifiers used when splitting a run seed.
namespace stream {
inline constexpr std::uint64_t kNature = 1;     // Born-rule sampling
inline constexpr std::uint64_t kTp1 = 2;
inline constexpr std::uint64_t kTp2 = 3;
inline constexpr std::uint64_t kAdversary = 4;
inline constexpr std::uint64_t kHarness = 5;
inline constexpr std::uint64_t kGame = 6;
inline constexpr std::uint64_t kMac = 7;
inline constexpr std::uint64_t kTrial = 1ULL << 32;  // + trial index
inline constexpr std::uint64_t kParty = 1ULL << 40;  // + participant index
}  // namespace stream

/// Seedable, splittable pseudorandom source.
///
/// The engine is mt19937_64, whose output sequence is fixed by the standard.
/// All conversions to doubles and bounded integers are done here rather than
/// through <random> distributions so that identical seeds reproduce identical
/// runs on every standard library.
///
/// `split` derives a child stream from the seed alone, never from the current
/// engine position, so streams can be created in any order.
class Rng {
   public:
    explicit Rng(std::uint64_t seed = 0) : seed_(seed), engine_(splitmix64(seed)) {}

    std::uint64_t seed() const noexcept { return seed_; }

    Rng split(std::uint64_t key) const noexcept {
        return Rng(splitmix64(seed_ ^ splitmix64(key + 0x632BE59BD9B4E019ULL)));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    bool coin() { return (engine_() >> 63) != 0; }

    std::uint8_t bit() { return coin() ? 1 : 0; }

    /// Uniform integer in [0, bound). Unbiased (rejection sampling).
    std::uint64_t below(std::uint64_t bound) {
        if (bound <= 1) {
            return 0;
        }
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Standard normal deviate (Box-Muller, one value per call).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

   private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

}  // namespace qee
