#include "hawkes_mf/random.hpp"
#include "hawkes_mf/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace hawkes_mf;

TEST_CASE("philox4x32-10 known-answer vectors") {
    // Published Random123 test vectors.
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
          std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          std::array<std::uint32_t, 4>{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and separated by purpose and substream") {
    RandomStream a(42, StreamPurpose::candidate_times);
    RandomStream b(42, StreamPurpose::candidate_times);
    RandomStream c(42, StreamPurpose::acceptance);
    RandomStream d(42, StreamPurpose::candidate_times, 1);
    std::vector<std::uint64_t> xa, xb, xc, xd;
    for (int i = 0; i < 16; ++i) {
        xa.push_back(a());
        xb.push_back(b());
        xc.push_back(c());
        xd.push_back(d());
    }
    CHECK(xa == xb);
    CHECK(xa != xc);
    CHECK(xa != xd);
    CHECK(a.blocks_used() == 8);
}

TEST_CASE("derive_seed depends on every argument") {
    const auto s = derive_seed(1, 2, 3);
    CHECK(s == derive_seed(1, 2, 3));
    CHECK(s != derive_seed(2, 2, 3));
    CHECK(s != derive_seed(1, 3, 3));
    CHECK(s != derive_seed(1, 2, 4));
}

TEST_CASE("uniform, exponential and normal moments") {
    RandomStream rng(7, StreamPurpose::test_paths);
    const int n = 200000;
    std::vector<double> u(n), e(n), z(n);
    for (int i = 0; i < n; ++i) {
        u[i] = rng.uniform();
        e[i] = rng.exponential(2.0);
        z[i] = rng.normal();
    }
    CHECK(*std::min_element(u.begin(), u.end()) >= 0.0);
    CHECK(*std::max_element(u.begin(), u.end()) < 1.0);
    const auto su = stats::summarize(u);
    const auto se = stats::summarize(e);
    const auto sz = stats::summarize(z);
    CHECK(std::abs(su.mean - 0.5) < 4 * std::sqrt(1.0 / 12 / n));
    CHECK(std::abs(se.mean - 0.5) < 4 * 0.5 / std::sqrt(n));
    CHECK(std::abs(sz.mean) < 4 / std::sqrt(n));
    CHECK(std::abs(sz.variance - 1.0) < 4 * std::sqrt(2.0 / n));
}

TEST_CASE("below is uniform on small ranges and shuffle permutes") {
    RandomStream rng(9, StreamPurpose::test_paths);
    std::vector<long> counts(6, 0);
    const int n = 60000;
    for (int i = 0; i < n; ++i) {
        ++counts[rng.below(6)];
    }
    double chi2 = 0;
    for (long c : counts) {
        chi2 += (c - n / 6.0) * (c - n / 6.0) / (n / 6.0);
    }
    CHECK(chi2 < 20.5); // chi-square(5) 0.999 quantile
    CHECK(rng.below(1) == 0);

    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    auto w = v;
    RandomStream r2(3, StreamPurpose::network_layout);
    shuffle(std::span<int>(w), r2);
    CHECK(w != v);
    std::sort(w.begin(), w.end());
    CHECK(w == v);
}

TEST_CASE("fill_u32 reproduces next_u32 across batch and buffer boundaries") {
    for (std::size_t skip : {0u, 1u, 3u, 5u}) {
        for (std::size_t len : {0u, 7u, 32u, 100u, 1601u}) {
            RandomStream a(77, StreamPurpose::network_edges, 2);
            RandomStream b(77, StreamPurpose::network_edges, 2);
            for (std::size_t i = 0; i < skip; ++i) {
                (void)a.next_u32();
                (void)b.next_u32();
            }
            std::vector<std::uint32_t> bulk(len);
            a.fill_u32(bulk);
            for (std::size_t i = 0; i < len; ++i) {
                REQUIRE(bulk[i] == b.next_u32());
            }
            CHECK(a.next_u32() == b.next_u32());
        }
    }
}
