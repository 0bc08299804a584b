#include "hawkes_mf/network.hpp"

#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/random.hpp"

#include <bit>
#include <cmath>
#include <numeric>

namespace hawkes_mf {

namespace {

void check_probability(double value, const char* name) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw ParameterError(std::string(name) + " must lie in [0, 1]");
    }
}

// Bernoulli(q) from one 32-bit word: exact for dyadic q (including 0, 1/2, 1),
// otherwise within 2^-32 of q.
std::uint64_t edge_threshold(double q) {
    return static_cast<std::uint64_t>(std::ldexp(q, 32));
}

} // namespace

NetworkConfiguration::NetworkConfiguration(std::size_t n, double p, double q, std::uint64_t seed, Origin origin,
                                           const std::vector<std::uint8_t>& adjacency,
                                           std::vector<std::int8_t> signs)
    : n_(n), p_(p), q_(q), seed_(seed), origin_(origin), words_per_row_((n + 63) / 64),
      signs_(std::move(signs)) {
    if (n == 0) {
        throw ParameterError("network needs at least one vertex");
    }
    check_probability(p, "p");
    check_probability(q, "q");
    if (adjacency.size() != n * n || signs_.size() != n) {
        throw ParameterError("adjacency must be n*n and signs must have n entries");
    }
    for (auto s : signs_) {
        if (s != 1 && s != -1) {
            throw ParameterError("signs must be +1 or -1");
        }
    }
    bits_.assign(n * words_per_row_, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto v = adjacency[j * n + i];
            if (v > 1) {
                throw ParameterError("adjacency entries must be 0 or 1");
            }
            if (v == 1) {
                const std::size_t bit = j * words_per_row_ * 64 + i;
                bits_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
            }
        }
    }
    build_index();
}

NetworkConfiguration::NetworkConfiguration(BitsTag, std::size_t n, double p, double q, std::uint64_t seed,
                                           Origin origin, std::vector<std::uint64_t> bits,
                                           std::vector<std::int8_t> signs)
    : n_(n), p_(p), q_(q), seed_(seed), origin_(origin), words_per_row_((n + 63) / 64), bits_(std::move(bits)),
      signs_(std::move(signs)) {
    build_index();
}

void NetworkConfiguration::build_index() {
    const std::size_t n = n_;
    std::size_t total = 0;
    for (auto w : bits_) {
        total += static_cast<std::size_t>(std::popcount(w));
    }
    out_index_.resize(total);
    out_offset_.assign(n + 1, 0);
    std::vector<std::uint32_t> in_degree(n, 0);
    std::uint32_t* out = out_index_.data();
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t w = 0; w < words_per_row_; ++w) {
            std::uint64_t word = bits_[j * words_per_row_ + w];
            const auto base = static_cast<std::uint32_t>(w * 64);
            while (word != 0) {
                const auto i = base + static_cast<std::uint32_t>(std::countr_zero(word));
                word &= word - 1;
                *out++ = i;
                ++in_degree[i];
            }
        }
        out_offset_[j + 1] = static_cast<std::size_t>(out - out_index_.data());
    }
    in_offset_.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
        in_offset_[i + 1] = in_offset_[i] + in_degree[i];
    }
    in_index_.resize(total);
    std::vector<std::uint32_t*> cursor(n);
    for (std::size_t i = 0; i < n; ++i) {
        cursor[i] = in_index_.data() + in_offset_[i];
    }
    for (std::size_t j = 0; j < n; ++j) {
        const auto source = static_cast<std::uint32_t>(j);
        for (std::size_t e = out_offset_[j]; e < out_offset_[j + 1]; ++e) {
            *cursor[out_index_[e]]++ = source;
        }
    }
}

long NetworkConfiguration::sign_sum() const noexcept {
    long total = 0;
    for (auto s : signs_) {
        total += s;
    }
    return total;
}

NetworkConfiguration sample_network(std::size_t n, double p, double q, std::uint64_t seed) {
    if (n == 0) {
        throw ParameterError("network needs at least one vertex");
    }
    check_probability(p, "p");
    check_probability(q, "q");
    RandomStream edges(seed, StreamPurpose::network_edges);
    RandomStream sign_stream(seed, StreamPurpose::network_signs);
    const auto threshold = edge_threshold(q);
    const std::size_t words = (n + 63) / 64;
    // Draw order is row-major over (j, i), one word per indicator.
    std::vector<std::uint64_t> bits(n * words, 0);
    std::vector<std::uint32_t> draws(n);
    for (std::size_t j = 0; j < n; ++j) {
        edges.fill_u32(draws);
        std::uint64_t* row = bits.data() + j * words;
        for (std::size_t i = 0; i < n; ++i) {
            row[i >> 6] |= static_cast<std::uint64_t>(draws[i] < threshold) << (i & 63);
        }
    }
    std::vector<std::int8_t> signs(n);
    for (auto& s : signs) {
        s = sign_stream.uniform() < p ? 1 : -1;
    }
    return {NetworkConfiguration::BitsTag{}, n, p, q, seed, NetworkConfiguration::Origin::erdos_renyi, std::move(bits),
            std::move(signs)};
}

NetworkConfiguration build_complementary_network(std::size_t n, std::uint64_t seed) {
    if (n < 2 || n % 2 != 0) {
        throw ParameterError("complementary network needs an even number of vertices");
    }
    const double q = 0.5;
    RandomStream layout(seed, StreamPurpose::network_layout);
    RandomStream edges(seed, StreamPurpose::network_edges);
    RandomStream sign_stream(seed, StreamPurpose::network_signs);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span<std::size_t>(order), layout);
    const std::size_t half = n / 2;

    std::vector<std::uint8_t> adjacency(n * n, 0);
    const auto threshold = edge_threshold(q);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 2; i < n; ++i) {
            adjacency[j * n + i] = edges.next_u32() < threshold ? 1 : 0;
        }
    }
    std::vector<std::int8_t> signs(n, 1);
    for (int side = 0; side < 2; ++side) {
        std::vector<std::int8_t> block(half, -1);
        std::fill(block.begin(), block.begin() + static_cast<std::ptrdiff_t>((half + 1) / 2), std::int8_t{1});
        shuffle(std::span<std::int8_t>(block), sign_stream);
        for (std::size_t k = 0; k < half; ++k) {
            const std::size_t j = order[side * half + k];
            adjacency[j * n + static_cast<std::size_t>(side)] = 1;
            signs[j] = block[k];
        }
    }
    return {n, 0.5, q, seed, NetworkConfiguration::Origin::complementary, adjacency, std::move(signs)};
}

WeightStatistics compute_weight_statistics(const NetworkConfiguration& net) {
    const std::size_t n = net.size();
    const auto dn = static_cast<double>(n);
    const double root_n = std::sqrt(dn);
    const double p = net.p();
    const double q = net.q();

    WeightStatistics stats;
    stats.row_mean_V.resize(n);
    std::vector<double> signed_in(n, 0.0);
    double sign_total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto targets = net.targets(j);
        stats.row_mean_V[j] = static_cast<double>(targets.size()) / dn;
        const double u = net.sign(j);
        sign_total += u;
        for (auto i : targets) {
            signed_in[i] += u;
        }
    }
    stats.W_N = (sign_total - dn * (2.0 * p - 1.0)) / root_n;
    stats.mean_UV_per_target.resize(n);
    stats.W_tilde.resize(n);
    stats.W_N_i.resize(n);
    double square_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        stats.mean_UV_per_target[i] = signed_in[i] / dn;
        stats.W_tilde[i] = (signed_in[i] - q * sign_total) / root_n;
        stats.W_N_i[i] = (signed_in[i] - dn * (2.0 * p - 1.0) * q) / root_n;
        square_sum += stats.W_N_i[i] * stats.W_N_i[i];
    }
    stats.mean_square_W = square_sum / dn;
    return stats;
}

std::string to_string(NetworkConfiguration::Origin origin) {
    switch (origin) {
    case NetworkConfiguration::Origin::erdos_renyi:
        return "erdos_renyi";
    case NetworkConfiguration::Origin::complementary:
        return "complementary";
    case NetworkConfiguration::Origin::explicit_matrix:
        return "explicit";
    }
    return "unknown";
}

nlohmann::json network_to_json(const NetworkConfiguration& net, bool include_matrices) {
    nlohmann::json j = {
        {"n", net.size()}, {"p", net.p()}, {"q", net.q()}, {"seed", net.seed()}, {"origin", to_string(net.origin())},
    };
    if (include_matrices) {
        auto rows = nlohmann::json::array();
        for (std::size_t src = 0; src < net.size(); ++src) {
            std::string row(net.size(), '0');
            for (auto t : net.targets(src)) {
                row[t] = '1';
            }
            rows.push_back(std::move(row));
        }
        j["adjacency"] = std::move(rows);
        j["signs"] = std::vector<int>(net.signs().begin(), net.signs().end());
    }
    return j;
}

NetworkConfiguration network_from_json(const nlohmann::json& j) {
    const auto n = j.at("n").get<std::size_t>();
    const auto p = j.at("p").get<double>();
    const auto q = j.at("q").get<double>();
    const auto seed = j.at("seed").get<std::uint64_t>();
    const auto origin = j.value("origin", std::string("erdos_renyi"));
    if (j.contains("adjacency")) {
        const auto& rows = j.at("adjacency");
        if (rows.size() != n) {
            throw ParameterError("adjacency must have n rows");
        }
        std::vector<std::uint8_t> adjacency(n * n);
        for (std::size_t src = 0; src < n; ++src) {
            const auto row = rows[src].get<std::string>();
            if (row.size() != n) {
                throw ParameterError("adjacency rows must have n entries");
            }
            for (std::size_t t = 0; t < n; ++t) {
                if (row[t] != '0' && row[t] != '1') {
                    throw ParameterError("adjacency rows may only contain '0' and '1'");
                }
                adjacency[src * n + t] = row[t] == '1' ? 1 : 0;
            }
        }
        auto sign_values = j.at("signs").get<std::vector<int>>();
        std::vector<std::int8_t> signs(sign_values.begin(), sign_values.end());
        const auto kind = origin == "complementary" ? NetworkConfiguration::Origin::complementary
                          : origin == "erdos_renyi" ? NetworkConfiguration::Origin::erdos_renyi
                                                    : NetworkConfiguration::Origin::explicit_matrix;
        return {n, p, q, seed, kind, adjacency, std::move(signs)};
    }
    if (origin == "complementary") {
        return build_complementary_network(n, seed);
    }
    if (origin == "erdos_renyi") {
        return sample_network(n, p, q, seed);
    }
    throw ParameterError("explicit networks must carry their adjacency matrix");
}

} // namespace hawkes_mf
