// Copyright 2026 The loopdyn Authors
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

#ifndef LOOPDYN_RNG_H
#define LOOPDYN_RNG_H

#include <array>
#include <cstdint>
#include <limits>

namespace loopdyn {

/// SplitMix64 finalizer (Stafford variant 13).
constexpr uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class SplitMix64 {
   public:
    explicit constexpr SplitMix64(uint64_t seed) : state_(seed) {}
    constexpr uint64_t operator()() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

   private:
    uint64_t state_;
};

/// xoshiro256** 1.0. Satisfies UniformRandomBitGenerator.
///
/// Per-trajectory streams: `Rng::for_stream(master_seed, index)` hashes the pair to a 64-bit key
///   key = mix64(mix64(master_seed) ^ (index + 0x632BE59BD9B4E019))
/// and fills the four state words with consecutive SplitMix64 outputs seeded by `key`. A stream
/// therefore depends only on (master_seed, index), never on which worker runs it.
class Rng {
   public:
    using result_type = uint64_t;

    explicit Rng(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto &w : s_) {
            w = sm();
        }
    }

    static Rng for_stream(uint64_t master_seed, uint64_t index) {
        return Rng(mix64(mix64(master_seed) ^ (index + 0x632BE59BD9B4E019ULL)));
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<uint64_t>::max(); }

    inline result_type operator()() {
        const uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    inline double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    /// Exactly uniform integer in [0, n), n < 2^32 (Lemire's multiply-shift with rejection).
    inline uint32_t below(uint32_t n) {
        while (true) {
            uint64_t m = static_cast<uint64_t>(static_cast<uint32_t>((*this)() >> 32)) * n;
            uint32_t low = static_cast<uint32_t>(m);
            if (low >= n || low >= static_cast<uint32_t>(-n) % n) {
                return static_cast<uint32_t>(m >> 32);
            }
        }
    }

    const std::array<uint64_t, 4> &state() const { return s_; }

   private:
    static constexpr uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<uint64_t, 4> s_{};
};

}  // namespace loopdyn

#endif
