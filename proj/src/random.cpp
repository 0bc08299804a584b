#include "hawkes_mf/random.hpp"

#include <cmath>
#include <numbers>

namespace hawkes_mf {

namespace {

constexpr std::uint32_t kMultiplier0 = 0xD2511F53u;
constexpr std::uint32_t kMultiplier1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMultiplier0, ctr[0], hi0, lo0);
        mulhilo(kMultiplier1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RandomStream::RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t substream) noexcept
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      purpose_(static_cast<std::uint32_t>(purpose)),
      substream_(substream) {}

void RandomStream::refill() noexcept {
    buffer_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                          purpose_, substream_},
                         key_);
    ++block_;
    position_ = 0;
}

std::uint32_t RandomStream::next_u32() noexcept {
    if (position_ >= 4) {
        refill();
    }
    return buffer_[position_++];
}

void RandomStream::fill_u32(std::span<std::uint32_t> out) noexcept {
    std::size_t k = 0;
    while (k < out.size() && position_ < 4) {
        out[k++] = buffer_[position_++];
    }
    // Eight independent counters per batch, laid out lane-wise so the rounds vectorize.
    constexpr std::size_t lanes = 8;
    while (out.size() - k >= 4 * lanes) {
        std::uint32_t c0[lanes], c1[lanes], c2[lanes], c3[lanes];
        for (std::size_t l = 0; l < lanes; ++l) {
            const std::uint64_t b = block_ + l;
            c0[l] = static_cast<std::uint32_t>(b);
            c1[l] = static_cast<std::uint32_t>(b >> 32);
            c2[l] = purpose_;
            c3[l] = substream_;
        }
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                k0 += kWeyl0;
                k1 += kWeyl1;
            }
            for (std::size_t l = 0; l < lanes; ++l) {
                const std::uint64_t p0 = static_cast<std::uint64_t>(kMultiplier0) * c0[l];
                const std::uint64_t p1 = static_cast<std::uint64_t>(kMultiplier1) * c2[l];
                const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
                const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
                c0[l] = hi1 ^ c1[l] ^ k0;
                c1[l] = lo1;
                c2[l] = hi0 ^ c3[l] ^ k1;
                c3[l] = lo0;
            }
        }
        for (std::size_t l = 0; l < lanes; ++l) {
            out[k++] = c0[l];
            out[k++] = c1[l];
            out[k++] = c2[l];
            out[k++] = c3[l];
        }
        block_ += lanes;
    }
    while (k < out.size()) {
        out[k++] = next_u32();
    }
}

std::uint64_t RandomStream::next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    return (hi << 32) | lo;
}

double RandomStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * kTwoPow53Inv;
}

double RandomStream::uniform_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * kTwoPow53Inv;
}

double RandomStream::exponential(double rate) noexcept {
    return -std::log(uniform_open()) / rate;
}

double RandomStream::normal() noexcept {
    if (has_cached_normal_) {
        has_cached_normal_ = false;
        return cached_normal_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

std::uint64_t RandomStream::below(std::uint64_t n) noexcept {
    if (n <= 1) {
        return 0;
    }
    // Lemire (2019), "Fast random integer generation in an interval".
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<u128>(next_u64()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t tag, std::uint64_t index) noexcept {
    const auto block = philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                                   static_cast<std::uint32_t>(StreamPurpose::replicate_seed), tag},
                                  {static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32)});
    return (static_cast<std::uint64_t>(block[0]) << 32) | block[1];
}

} // namespace hawkes_mf
