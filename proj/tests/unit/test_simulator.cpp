#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/network.hpp"
#include "hawkes_mf/simulator.hpp"
#include "hawkes_mf/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace hawkes_mf;

namespace {

SimulationConfig config(double horizon, std::uint64_t seed, Scaling scaling = Scaling::mean_field) {
    SimulationConfig c;
    c.horizon = horizon;
    c.seed = seed;
    c.scaling = scaling;
    return c;
}

double mean_count(const SimulationResult& r) {
    return static_cast<double>(r.trains.total_events()) / static_cast<double>(r.trains.times.size());
}

} // namespace

TEST_CASE("constant intensity is a Poisson process under both backends") {
    const auto h = TransferFunction::constant(1.0);
    const auto k = Kernel::exponential(1.0);
    for (auto backend : {Backend::thinning, Backend::time_change}) {
        std::vector<double> means;
        for (std::uint64_t s = 0; s < 50; ++s) {
            const auto net = sample_network(200, 0.8, 0.5, 1000 + s);
            means.push_back(mean_count(simulate(net, k, h, config(10.0, s), backend)));
        }
        const double pooled = stats::summarize(means).mean;
        CHECK(std::abs(pooled - 10.0) < 3 * std::sqrt(10.0 / (50 * 200)));
    }
}

TEST_CASE("isolated vertex fires at rate h(0)") {
    const auto net = sample_network(1, 0.8, 0.0, 3);
    std::vector<double> counts;
    for (std::uint64_t s = 0; s < 400; ++s) {
        counts.push_back(mean_count(simulate(net, Kernel::exponential(1.0), TransferFunction::arctan(),
                                             config(5.0, s), Backend::thinning)));
    }
    const auto sum = stats::summarize(counts);
    CHECK(std::abs(sum.mean - 5.0) < 3 * std::sqrt(5.0 / 400));
}

TEST_CASE("inter-event times agree across backends for constant h") {
    const auto net = sample_network(100, 0.5, 0.5, 1);
    const auto h = TransferFunction::constant(1.0);
    auto gaps = [&](Backend b) {
        const auto r = simulate(net, Kernel::exponential(1.0), h, config(100.0, 17), b);
        std::vector<double> g;
        for (const auto& train : r.trains.times) {
            for (std::size_t i = 1; i < train.size(); ++i) {
                g.push_back(train[i] - train[i - 1]);
            }
        }
        return g;
    };
    const auto a = gaps(Backend::thinning);
    const auto b = gaps(Backend::time_change);
    CHECK(a.size() > 9000);
    CHECK(stats::ks_two_sample(a, b).p_value > 0.01);
}

TEST_CASE("self-loop vertex: backends agree on the mean count") {
    const auto net = sample_network(1, 1.0, 1.0, 3);
    const auto k = Kernel::exponential(1.0);
    const auto h = TransferFunction::arctan();
    std::vector<double> a, b;
    for (std::uint64_t s = 0; s < 100; ++s) {
        a.push_back(mean_count(simulate(net, k, h, config(10.0, s), Backend::thinning)));
        b.push_back(mean_count(simulate(net, k, h, config(10.0, 500 + s), Backend::time_change)));
    }
    const auto sa = stats::summarize(a);
    const auto sb = stats::summarize(b);
    CHECK(std::abs(sa.mean - sb.mean) < 3 * std::hypot(sa.se, sb.se));
}

TEST_CASE("critical scaling with balanced signs stays near h(0)") {
    // A single network carries a random net sign sum of order sqrt(N), which
    // shifts every rate the same way; average over freshly drawn networks.
    std::vector<double> a, b;
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto net = sample_network(500, 0.5, 0.5, 40 + s);
        const auto c = config(5.0, s, Scaling::critical);
        a.push_back(mean_count(simulate(net, Kernel::exponential(1.0), TransferFunction::arctan(), c,
                                        Backend::thinning)));
        b.push_back(mean_count(simulate(net, Kernel::exponential(1.0), TransferFunction::arctan(), c,
                                        Backend::time_change)));
    }
    const auto sa = stats::summarize(a);
    const auto sb = stats::summarize(b);
    CHECK(std::abs(sa.mean - 5.0) < 0.5);
    CHECK(std::abs(sa.mean - sb.mean) < 3 * std::hypot(sa.se, sb.se));
}

TEST_CASE("empty horizon and determinism") {
    const auto net = sample_network(30, 0.8, 0.5, 2);
    const auto k = Kernel::exponential(1.0);
    const auto h = TransferFunction::arctan();
    for (auto b : {Backend::thinning, Backend::time_change}) {
        const auto r = simulate(net, k, h, config(0.0, 1), b);
        CHECK(r.trains.total_events() == 0);
        CHECK(r.grid.points() == 1);
        CHECK(r.tracked_paths.empty());
        const auto x = simulate(net, k, h, config(3.0, 9), b);
        const auto y = simulate(net, k, h, config(3.0, 9), b);
        const auto z = simulate(net, k, h, config(3.0, 10), b);
        CHECK(x.trains.times == y.trains.times);
        CHECK(x.final_intensity == y.final_intensity);
        CHECK(x.trains.times != z.trains.times);
    }
    CHECK(simulate(net, k, h, config(3.0, 9), Backend::thinning).trains.times !=
          simulate(net, k, h, config(3.0, 9), Backend::time_change).trains.times);
}

TEST_CASE("events are sorted, inside the horizon, and the recording uses left limits") {
    const auto net = sample_network(40, 0.9, 0.6, 5);
    auto c = config(4.0, 3);
    c.tracked = {0, 7};
    const auto r = simulate(net, Kernel::exponential(1.0), TransferFunction::arctan(), c, Backend::thinning);
    for (const auto& train : r.trains.times) {
        for (std::size_t i = 0; i < train.size(); ++i) {
            CHECK(train[i] >= 0.0);
            CHECK(train[i] < 4.0);
            if (i > 0) {
                CHECK(train[i] > train[i - 1]);
            }
        }
    }
    CHECK(r.tracked_paths.size() == 2);
    CHECK(r.tracked_paths[0].front() == 0.0);
    CHECK(r.diagnostics.max_acceptance_ratio <= 1.0);
    CHECK(r.diagnostics.accepted == r.trains.total_events());

    // Recorded I^{N,7}(t-) equals the direct jump sum over its sources at a few nodes.
    const double theta = r.theta;
    for (std::size_t m : {100u, 1000u, 2048u}) {
        const double t = r.grid.time(m);
        double direct = 0;
        for (auto j : net.sources(7)) {
            for (double s : r.trains.times[j]) {
                if (s < t) {
                    direct += theta * net.sign(j) * std::exp(-(t - s));
                }
            }
        }
        CHECK(r.tracked_paths[1][m] == doctest::Approx(direct).epsilon(1e-10));
    }
    CHECK(r.final_intensity[7] == doctest::Approx(r.tracked_paths[1].back()));
}

TEST_CASE("exponential fast path equals history recomputation") {
    const auto net = sample_network(30, 0.8, 0.5, 8);
    for (auto b : {Backend::thinning, Backend::time_change}) {
        auto c = config(5.0, 4);
        c.record_full = true;
        const auto fast = simulate(net, Kernel::exponential(1.0), TransferFunction::arctan(), c, b);
        c.kernel_path = KernelPath::history;
        const auto slow = simulate(net, Kernel::exponential(1.0), TransferFunction::arctan(), c, b);
        REQUIRE(fast.trains.total_events() <= 1000);
        REQUIRE(fast.trains.times == slow.trains.times);
        double worst = 0;
        for (std::size_t i = 0; i < fast.full_paths.size(); ++i) {
            worst = std::max(worst, std::abs(fast.full_paths[i] - slow.full_paths[i]));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("invalid simulation requests") {
    const auto net = sample_network(5, 0.8, 0.5, 2);
    const auto k = Kernel::exponential(1.0);
    CHECK_THROWS_AS((void)simulate(net, k, TransferFunction::rectified_linear(1, 1), config(1.0, 1),
                                   Backend::thinning),
                    UnsupportedTransferError);
    auto c = config(1.0, 1);
    c.tracked = {5};
    CHECK_THROWS_AS((void)simulate(net, k, TransferFunction::arctan(), c, Backend::thinning), ParameterError);
    CHECK_THROWS_AS((void)simulate(net, k, TransferFunction::arctan(), config(-1.0, 1), Backend::thinning),
                    ParameterError);
    const auto r = simulate(net, k, TransferFunction::arctan(), config(1.0, 1), Backend::thinning);
    const std::vector<std::size_t> v{0};
    CHECK_THROWS_AS((void)extract_martingale_paths(r, net, TransferFunction::arctan(), v), StateError);
    CHECK(parse_backend("timechange") == Backend::time_change);
    CHECK_THROWS_AS((void)parse_scaling("weird"), ParameterError);
}

TEST_CASE("martingale paths: identities and compensated Poisson moments") {
    const auto h = TransferFunction::constant(1.0);
    std::vector<double> totals;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const auto net = sample_network(20, 0.5, 0.5, 77 + s);
        auto c = config(2.0, s);
        c.record_full = true;
        c.record_step = 2.0 / 64;
        const auto r = simulate(net, Kernel::exponential(1.0), h, c, Backend::thinning);
        const std::vector<std::size_t> v{0, 1};
        const auto mp = extract_martingale_paths(r, net, h, v);
        totals.push_back(mp.total.back());
        for (std::size_t k = 0; k < 2; ++k) {
            for (std::size_t m = 0; m < mp.grid.points(); ++m) {
                CHECK(std::abs(mp.vertex[k][m] - (mp.idiosyncratic[k][m] + 0.5 * mp.common[m])) < 1e-12);
            }
        }
        CHECK(mp.covariations.size() == 3);
    }
    const auto s = stats::summarize(totals);
    CHECK(std::abs(s.mean) < 3 * s.se);
    CHECK(std::abs(s.variance - 2.0) < 3 * s.variance_se);
}

TEST_CASE("complete graph has no idiosyncratic martingale") {
    const auto net = sample_network(50, 0.5, 1.0, 4);
    auto c = config(3.0, 2, Scaling::critical);
    c.record_full = true;
    const auto h = TransferFunction::arctan();
    const auto r = simulate(net, Kernel::exponential(1.0), h, c, Backend::thinning);
    const std::vector<std::size_t> v{0, 1, 2};
    const auto mp = extract_martingale_paths(r, net, h, v);
    for (const auto& path : mp.idiosyncratic) {
        for (double x : path) {
            CHECK(x == 0.0);
        }
    }
    for (const auto& cv : mp.covariations) {
        for (double x : cv.predictable) {
            CHECK(x == 0.0);
        }
    }
}
