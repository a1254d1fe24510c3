// Copyright 2026 The rank2 Authors
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

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace rank2 {

/// SplitMix64 output finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Derives a child seed from a parent seed and a path of integer keys.
/// Distinct key paths give statistically independent streams.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) noexcept {
    std::uint64_t s = mix64(seed ^ 0x6A09E667F3BCC909ULL);
    for (std::uint64_t k : keys) {
        s = mix64(s + 0x9E3779B97F4A7C15ULL * (k + 1));
    }
    return s;
}

/// SplitMix64 generator. Satisfies UniformRandomBitGenerator.
///
/// Streams are addressed by (seed, index) via `Rng::stream`, so work can be
/// split across threads without changing which numbers each unit of work
/// consumes. Uniform doubles are produced from the top 53 bits so results do
/// not depend on the standard library's distribution implementations.
class Rng {
   public:
    using result_type = std::uint64_t;

    constexpr explicit Rng(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr Rng stream(std::uint64_t seed, std::uint64_t index) noexcept {
        return Rng(derive_seed(seed, {index}));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    constexpr result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    /// Uniform double in [0, 1).
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n). n must be positive.
    constexpr std::uint64_t below(std::uint64_t n) noexcept {
        // Lemire's nearly-divisionless method with rejection.
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

   private:
    std::uint64_t state_;
};

}  // namespace rank2
