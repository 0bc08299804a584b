#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace hawkes_mf {

/// Random directed graph with signed sources. Row j is the source, column i the
/// target; self-entries V_ii are sampled like any other edge. Immutable after
/// construction and safe to share between threads.
class NetworkConfiguration {
public:
    enum class Origin { erdos_renyi, complementary, explicit_matrix };

    /// Build from explicit indicators. `adjacency` is row-major n*n with entries 0/1,
    /// `signs` has entries +1/-1. Throws ParameterError otherwise.
    NetworkConfiguration(std::size_t n, double p, double q, std::uint64_t seed, Origin origin,
                         const std::vector<std::uint8_t>& adjacency, std::vector<std::int8_t> signs);

    [[nodiscard]] std::size_t size() const noexcept { return n_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double q() const noexcept { return q_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] Origin origin() const noexcept { return origin_; }

    [[nodiscard]] bool edge(std::size_t source, std::size_t target) const noexcept {
        const std::size_t bit = source * words_per_row_ * 64 + target;
        return (bits_[bit >> 6] >> (bit & 63)) & 1u;
    }
    [[nodiscard]] int sign(std::size_t vertex) const noexcept { return signs_[vertex]; }
    [[nodiscard]] std::span<const std::int8_t> signs() const noexcept { return signs_; }

    /// Targets i with V_{source,i} = 1, ascending.
    [[nodiscard]] std::span<const std::uint32_t> targets(std::size_t source) const noexcept {
        return {out_index_.data() + out_offset_[source], out_offset_[source + 1] - out_offset_[source]};
    }
    /// Sources j with V_{j,target} = 1, ascending.
    [[nodiscard]] std::span<const std::uint32_t> sources(std::size_t target) const noexcept {
        return {in_index_.data() + in_offset_[target], in_offset_[target + 1] - in_offset_[target]};
    }

    [[nodiscard]] std::size_t edge_count() const noexcept { return out_index_.size(); }
    /// Sum of signs; nonzero only when exact balance was impossible.
    [[nodiscard]] long sign_sum() const noexcept;

    friend bool operator==(const NetworkConfiguration& a, const NetworkConfiguration& b) noexcept {
        return a.n_ == b.n_ && a.bits_ == b.bits_ && a.signs_ == b.signs_;
    }

private:
    friend NetworkConfiguration sample_network(std::size_t n, double p, double q, std::uint64_t seed);

    struct BitsTag {};
    /// From packed rows (n * words_per_row words, row-major).
    NetworkConfiguration(BitsTag, std::size_t n, double p, double q, std::uint64_t seed, Origin origin,
                         std::vector<std::uint64_t> bits, std::vector<std::int8_t> signs);
    void build_index();

    std::size_t n_;
    double p_;
    double q_;
    std::uint64_t seed_;
    Origin origin_;
    std::size_t words_per_row_;
    std::vector<std::uint64_t> bits_;
    std::vector<std::int8_t> signs_;
    std::vector<std::size_t> out_offset_;
    std::vector<std::uint32_t> out_index_;
    std::vector<std::size_t> in_offset_;
    std::vector<std::uint32_t> in_index_;
};

/// V_ji iid Bernoulli(q) over all ordered pairs, U_j iid with P(U_j = 1) = p.
[[nodiscard]] NetworkConfiguration sample_network(std::size_t n, double p, double q, std::uint64_t seed);

/// Vertices 0 and 1 receive input from complementary halves of the graph
/// (sum_j V_j0 = sum_j V_j1 = n/2, sum_j V_j0 V_j1 = 0); every other column is
/// Bernoulli(1/2). Signs are balanced inside each half so W^{N,0} = W^{N,1}
/// exactly; when n/2 is odd each half sums to +1 and sum_j U_j = 2.
[[nodiscard]] NetworkConfiguration build_complementary_network(std::size_t n, std::uint64_t seed);

struct WeightStatistics {
    std::vector<double> row_mean_V;          // (1/N) sum_i V_ji
    std::vector<double> mean_UV_per_target;  // (1/N) sum_j U_j V_ji
    double W_N{0.0};                         // (1/sqrt N) sum_j (U_j - (2p-1))
    std::vector<double> W_tilde;             // (1/sqrt N) sum_j U_j (V_ji - q)
    std::vector<double> W_N_i;               // (1/sqrt N) sum_j (U_j V_ji - (2p-1) q)
    double mean_square_W{0.0};               // (1/N) sum_i (W^{N,i})^2
};

[[nodiscard]] WeightStatistics compute_weight_statistics(const NetworkConfiguration& net);

/// JSON form: {"n","p","q","seed","origin"} plus optional "adjacency" (one
/// '0'/'1' string per source row) and "signs".
[[nodiscard]] nlohmann::json network_to_json(const NetworkConfiguration& net, bool include_matrices);
/// Inverse of network_to_json; without matrices the network is resampled from its seed.
[[nodiscard]] NetworkConfiguration network_from_json(const nlohmann::json& j);

[[nodiscard]] std::string to_string(NetworkConfiguration::Origin origin);

} // namespace hawkes_mf
