#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>

namespace hawkes_mf {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3", SC'11). Maps a 128-bit counter and a 64-bit key to 128
/// pseudo-random bits; output is identical on every platform.
[[nodiscard]] std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                                     std::array<std::uint32_t, 2> key) noexcept;

/// Purpose tags. Every random draw in the library comes from exactly one
/// (seed, purpose, substream) triple, so changing how one consumer uses its
/// stream never shifts the numbers seen by another.
enum class StreamPurpose : std::uint32_t {
    network_edges = 1,
    network_signs = 2,
    network_layout = 3,
    candidate_times = 10,
    vertex_assignment = 11,
    acceptance = 12,
    vertex_clock = 13,   // substream = vertex index
    vertex_marks = 14,   // substream = vertex index
    fluctuation_common = 20,
    fluctuation_vertex = 21, // substream = tracked vertex index
    fluctuation_coupled = 22,
    replicate_seed = 30,
    test_paths = 40,
};

/// Counter-based stream: block index i of stream (seed, purpose, substream) is
/// philox4x32({i_lo, i_hi, purpose, substream}, {seed_lo, seed_hi}).
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t substream = 0) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
    result_type operator()() noexcept { return next_u64(); }

    std::uint32_t next_u32() noexcept;
    std::uint64_t next_u64() noexcept;

    /// 53-bit uniform on [0, 1).
    double uniform() noexcept;
    /// 53-bit uniform on the open interval (0, 1).
    double uniform_open() noexcept;
    /// Exponential with the given rate (rate > 0), by inversion.
    double exponential(double rate) noexcept;
    /// Standard normal via Box-Muller; the second variate of each pair is cached.
    double normal() noexcept;
    /// Same values as out.size() calls of next_u32, generated in batches.
    void fill_u32(std::span<std::uint32_t> out) noexcept;
    /// Uniform integer in [0, n) by Lemire's multiply-and-reject method.
    std::uint64_t below(std::uint64_t n) noexcept;

    /// Number of 128-bit blocks consumed so far.
    [[nodiscard]] std::uint64_t blocks_used() const noexcept { return block_; }

private:
    void refill() noexcept;

    std::array<std::uint32_t, 2> key_{};
    std::uint32_t purpose_{};
    std::uint32_t substream_{};
    std::uint64_t block_{0};
    std::array<std::uint32_t, 4> buffer_{};
    unsigned position_{4};
    double cached_normal_{0.0};
    bool has_cached_normal_{false};
};

/// Deterministic child seed, e.g. replicate r of a master seed.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t master, std::uint32_t tag, std::uint64_t index) noexcept;

/// Fisher-Yates shuffle driven by RandomStream::below, reproducible across
/// standard libraries (unlike std::shuffle).
template <typename T>
void shuffle(std::span<T> values, RandomStream& rng) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.below(i));
        using std::swap;
        swap(values[i - 1], values[j]);
    }
}

} // namespace hawkes_mf
