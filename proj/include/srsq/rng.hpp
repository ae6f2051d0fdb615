// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#ifndef SRSQ_RNG_HPP
#define SRSQ_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>
#include <utility>

// Keyed random streams. Every work item (population x permutation x
// replication) derives its own stream from the master seed, so results do
// not depend on scheduling or worker count, and the whole simulation is
// reproducible from one 64-bit seed. The generators are self-contained
// 64-bit integer arithmetic; unlike the std:: distributions they produce
// the same sequence on every platform.

namespace srsq {

// splitmix64 finalizer. Doubles as the token mixer for stream keys and as
// the state expander for xoshiro.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Accumulates a 64-bit key from a master seed plus a sequence of tokens
// (integers and strings). Order-sensitive: absorb(a).absorb(b) differs
// from absorb(b).absorb(a).
class StreamKey {
public:
    explicit StreamKey(std::uint64_t master_seed) : state_(mix64(master_seed)) {}

    StreamKey& absorb(std::uint64_t token) {
        state_ = mix64(state_ ^ token);
        return *this;
    }

    StreamKey& absorb(std::string_view token) {
        // FNV-1a over the bytes, then fold into the running state.
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (unsigned char c : token) {
            h ^= c;
            h *= 0x100000001b3ull;
        }
        return absorb(h);
    }

    std::uint64_t value() const { return state_; }

private:
    std::uint64_t state_;
};

// xoshiro256++ seeded by splitmix64 expansion of a 64-bit key.
class RngStream {
public:
    explicit RngStream(std::uint64_t key) {
        std::uint64_t z = key;
        for (auto& word : state_) {
            word = mix64(z);
            z = word;
        }
    }

    explicit RngStream(const StreamKey& key) : RngStream(key.value()) {}

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in {0, ..., n-1}, unbiased (bitmask rejection).
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n <= 1) return 0;
        const std::uint64_t mask = mask_for(n - 1);
        std::uint64_t r;
        do {
            r = next_u64() & mask;
        } while (r >= n);
        return r;
    }

    // Standard normal via Box-Muller. Consumes two uniforms per call.
    double next_normal() {
        double u1 = next_double();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static constexpr std::uint64_t mask_for(std::uint64_t v) {
        std::uint64_t m = v;
        m |= m >> 1;
        m |= m >> 2;
        m |= m >> 4;
        m |= m >> 8;
        m |= m >> 16;
        m |= m >> 32;
        return m;
    }

    std::uint64_t state_[4];
};

// Fisher-Yates shuffle driven by an RngStream.
template <class T>
void shuffle(std::span<T> items, RngStream& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.uniform_below(i));
        std::swap(items[i - 1], items[j]);
    }
}

} // namespace srsq

#endif // SRSQ_RNG_HPP
