// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "srsq/rng.hpp"

using namespace srsq;

TEST_CASE("mix64 is a bijective finalizer with no obvious fixed structure") {
    CHECK(mix64(0) != 0);
    CHECK(mix64(1) != mix64(2));
    // Consecutive inputs should differ in roughly half their bits.
    int bits = __builtin_popcountll(mix64(42) ^ mix64(43));
    CHECK(bits > 16);
    CHECK(bits < 48);
}

TEST_CASE("stream keys are order-sensitive and token-type-sensitive") {
    StreamKey a(7);
    a.absorb(std::uint64_t{1}).absorb(std::uint64_t{2});
    StreamKey b(7);
    b.absorb(std::uint64_t{2}).absorb(std::uint64_t{1});
    CHECK(a.value() != b.value());

    StreamKey c(7);
    c.absorb("alpha");
    StreamKey d(7);
    d.absorb("beta");
    CHECK(c.value() != d.value());

    StreamKey e(7);
    e.absorb("alpha");
    StreamKey f(7);
    f.absorb("alpha");
    CHECK(e.value() == f.value());

    CHECK(StreamKey(1).value() != StreamKey(2).value());
}

TEST_CASE("equal keys give identical streams, different keys diverge") {
    RngStream r1(123456u), r2(123456u), r3(123457u);
    bool any_diff = false;
    for (int i = 0; i < 64; ++i) {
        const auto a = r1.next_u64();
        CHECK(a == r2.next_u64());
        if (a != r3.next_u64()) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("next_double lies in [0,1) and is roughly uniform") {
    RngStream rng(99u);
    const int n = 20000;
    int below_half = 0;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        const double u = rng.next_double();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
        if (u < 0.5) ++below_half;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.02));
    CHECK(std::abs(below_half / static_cast<double>(n) - 0.5) < 0.02);
}

TEST_CASE("uniform_below is bounded and unbiased across residues") {
    RngStream rng(5u);
    CHECK(rng.uniform_below(0) == 0);
    CHECK(rng.uniform_below(1) == 0);

    // n=6 exercises the rejection path (mask 7).
    const int trials = 60000;
    std::vector<int> counts(6, 0);
    for (int i = 0; i < trials; ++i) {
        const auto v = rng.uniform_below(6);
        REQUIRE(v < 6);
        ++counts[static_cast<std::size_t>(v)];
    }
    for (int c : counts) {
        // Expected 10000, sd ~= 91; allow 6 sigma.
        CHECK(std::abs(c - 10000) < 550);
    }
}

TEST_CASE("next_normal has standard-normal moments and symmetry") {
    RngStream rng(2024u);
    const int n = 100000;
    double sum = 0.0, sumsq = 0.0;
    int negative = 0;
    for (int i = 0; i < n; ++i) {
        const double x = rng.next_normal();
        sum += x;
        sumsq += x * x;
        if (x < 0.0) ++negative;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.03);
    CHECK(std::abs(negative / static_cast<double>(n) - 0.5) < 0.01);
}

TEST_CASE("shuffle produces a permutation and hits all orderings of 3") {
    RngStream rng(77u);
    std::vector<int> items = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto sorted = items;
    shuffle(std::span<int>(items), rng);
    auto resorted = items;
    std::sort(resorted.begin(), resorted.end());
    CHECK(resorted == sorted);

    // Each of the 6 orderings of 3 items should appear ~1000 times in 6000.
    std::map<std::vector<int>, int> freq;
    for (int t = 0; t < 6000; ++t) {
        std::vector<int> v = {1, 2, 3};
        shuffle(std::span<int>(v), rng);
        ++freq[v];
    }
    CHECK(freq.size() == 6);
    for (const auto& [order, count] : freq) {
        // sd ~= 29; allow ~5 sigma.
        CHECK(std::abs(count - 1000) < 150);
    }
}

TEST_CASE("shuffle of empty and single spans is a no-op") {
    RngStream rng(1u);
    std::vector<int> empty;
    shuffle(std::span<int>(empty), rng);
    CHECK(empty.empty());
    std::vector<int> one = {42};
    shuffle(std::span<int>(one), rng);
    CHECK(one == std::vector<int>{42});
}
