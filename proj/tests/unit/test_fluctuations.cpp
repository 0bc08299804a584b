#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/fluctuations.hpp"
#include "hawkes_mf/parallel.hpp"
#include "hawkes_mf/stats.hpp"
#include "hawkes_mf/volterra.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace hawkes_mf;

namespace {

IntensityPath mean_field(double p, double q, double horizon, std::size_t intervals) {
    return solve_mean_field(Kernel::exponential(1.0), TransferFunction::arctan(), p, q, horizon,
                            horizon / static_cast<double>(intervals), MeanFieldScheme::volterra_trapezoid);
}

} // namespace

TEST_CASE("balanced signs: variance of Kbar matches the discrete isometry") {
    const double q = 0.6, T = 2.0;
    const std::size_t M = 128;
    const auto I = mean_field(0.5, q, T, M);
    const auto ens = sample_fluctuation_ensemble(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.5, q, 0,
                                                 10000, 31, default_jobs());
    // Oracle on the same grid: h(0) = 1, Var W = 4p(1-p) = 1.
    const double dt = T / M;
    double sq = 0, lin = 0;
    for (std::size_t i = 0; i < M; ++i) {
        const double phi = std::exp(-(T - i * dt));
        sq += phi * phi * dt;
        lin += phi * dt;
    }
    const double expected = q * q * sq + q * q * lin * lin;
    std::vector<double> kbar;
    for (const auto& row : ens.terminal) {
        kbar.push_back(row[0]);
    }
    const auto s = stats::summarize(kbar);
    CHECK(std::abs(s.variance - expected) < 3 * s.variance_se);
    CHECK(std::abs(s.mean) < 3 * s.se);
}

TEST_CASE("complete graph: vertex fluctuations equal the common one") {
    const auto I = mean_field(0.8, 1.0, 2.0, 256);
    const auto s = simulate_fluctuations(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 1.0, 3, 5);
    for (const auto& k : s.K) {
        CHECK(k == s.Kbar);
    }
    std::vector<FluctuationSample> samples;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        samples.push_back(
            simulate_fluctuations(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 1.0, 2, seed));
    }
    const auto c = covariance_matrix(samples, 2.0);
    for (std::size_t a = 0; a < 3; ++a) {
        for (std::size_t b = 0; b < 3; ++b) {
            CHECK(c.cov(a, b) == doctest::Approx(c.cov(0, 0)).epsilon(1e-12));
        }
    }
}

TEST_CASE("zero forcing gives the zero solution") {
    const auto I = mean_field(0.9, 0.5, 2.0, 256);
    FluctuationOptions o;
    o.zero_common_noise = true;
    const auto s = simulate_fluctuations(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.9, 0.5, 0, 1, o);
    for (double x : s.Kbar) {
        CHECK(x == 0.0);
    }
}

TEST_CASE("convolution is linear in the driver") {
    const auto I = mean_field(0.8, 0.5, 2.0, 256);
    const auto a = simulate_fluctuations(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 2, 9);
    FluctuationOptions o;
    o.driver_scale = 2.0;
    const auto b = simulate_fluctuations(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 2, 9, o);
    for (std::size_t m = 0; m < a.Kbar.size(); ++m) {
        CHECK(b.Kbar[m] == 2.0 * a.Kbar[m]);
        CHECK(b.K[1][m] == 2.0 * a.K[1][m]);
    }
}

TEST_CASE("general kernels use the same recursion as the exponential fast path") {
    const double T = 2.0;
    const std::size_t M = 256;
    const double dt = T / M;
    std::vector<double> v, d;
    for (std::size_t i = 0; i <= M; ++i) {
        v.push_back(std::exp(-(i * dt)));
        d.push_back(-v.back());
    }
    const auto I = mean_field(0.8, 0.5, T, M);
    const auto a = simulate_fluctuations(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 1, 4);
    const auto b = simulate_fluctuations(I, Kernel::tabulated(dt, v, d), TransferFunction::arctan(), 0.8, 0.5, 1, 4);
    for (std::size_t m = 0; m <= M; ++m) {
        CHECK(std::abs(a.Kbar[m] - b.Kbar[m]) < 1e-10);
        CHECK(std::abs(a.K[0][m] - b.K[0][m]) < 1e-10);
    }
}

TEST_CASE("vertex drivers are independent across k") {
    const auto I = mean_field(0.8, 0.5, 1.0, 64);
    const auto ens = sample_fluctuation_ensemble(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 2,
                                                 2000, 3, default_jobs());
    std::vector<double> w1, w2;
    for (const auto& w : ens.W_tilde) {
        w1.push_back(w[0]);
        w2.push_back(w[1]);
    }
    const auto c = stats::covariance(w1, w2);
    CHECK(std::abs(c.value) < 3 * c.se);
    const auto s = stats::summarize(ens.W);
    CHECK(std::abs(s.variance - 4 * 0.8 * 0.2) < 3 * s.variance_se);
    // Stored standardized; the sqrt(q(1-q)) factor is applied inside the system.
    const auto st = stats::summarize(w1);
    CHECK(std::abs(st.variance - 1.0) < 3 * st.variance_se);
}

TEST_CASE("refining the grid leaves the mean of Kbar_T unchanged") {
    std::vector<double> means, ses;
    for (std::size_t M : {64u, 128u}) {
        const auto I = mean_field(0.8, 0.5, 2.0, M);
        const auto ens = sample_fluctuation_ensemble(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8,
                                                     0.5, 0, 1000, 11 + M, default_jobs());
        std::vector<double> kbar;
        for (const auto& row : ens.terminal) {
            kbar.push_back(row[0]);
        }
        const auto s = stats::summarize(kbar);
        means.push_back(s.mean);
        ses.push_back(s.se);
    }
    // Two independent Monte Carlo means: compare on the standard error of their difference.
    CHECK(std::abs(means[0] - means[1]) < 3 * std::hypot(ses[0], ses[1]));
}

TEST_CASE("ensembles are reproducible and independent of the worker count") {
    const auto I = mean_field(0.8, 0.5, 1.0, 64);
    const auto a = sample_fluctuation_ensemble(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 2,
                                               40, 5, 1);
    const auto b = sample_fluctuation_ensemble(I, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 2,
                                               40, 5, 3);
    CHECK(a.terminal == b.terminal);
    CHECK(a.total_count_limit == b.total_count_limit);
    CHECK(a.seeds == b.seeds);
}

TEST_CASE("covariance estimator") {
    const std::vector<std::vector<double>> rows{{1, 2}, {2, 1}, {3, 5}, {4, 4}};
    const auto c = covariance_of_rows(rows);
    CHECK(c.mean[0] == doctest::Approx(2.5));
    CHECK(c.cov(0, 0) == doctest::Approx(5.0 / 3));
    CHECK(c.cov(0, 1) == doctest::Approx(5.0 / 3));
    CHECK(c.cov(1, 0) == c.cov(0, 1));
    CHECK(c.se(0, 1) > 0);
    CHECK_THROWS_AS((void)covariance_of_rows({{1.0}}), ParameterError);
    CHECK_THROWS_AS((void)covariance_of_rows({{1.0, 2.0}, {1.0}}), ContractError);

    const auto I1 = mean_field(0.8, 0.5, 1.0, 64);
    const auto I2 = mean_field(0.8, 0.5, 1.0, 128);
    std::vector<FluctuationSample> mixed{
        simulate_fluctuations(I1, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 1, 1),
        simulate_fluctuations(I2, Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 1, 2)};
    CHECK_THROWS_AS((void)covariance_matrix(mixed, 1.0), ContractError);
}

TEST_CASE("a transfer without derivative is rejected") {
    const auto I = mean_field(0.8, 0.5, 1.0, 64);
    CHECK_THROWS_AS((void)simulate_fluctuations(I, Kernel::exponential(1.0),
                                                TransferFunction::tabulated(0, 1, {1, 2}), 0.8, 0.5, 1, 1),
                    CapabilityError);
}
