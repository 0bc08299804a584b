#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/volterra.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace hawkes_mf;

namespace {

// Plain bisection for lambda x = c h(x) with h = 1 + (2/pi) arctan.
double bisect_arctan_root(double c, double lambda) {
    auto g = [&](double x) { return c * (1 + 2 / std::numbers::pi * std::atan(x)) - lambda * x; };
    double lo = -10, hi = 10;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double max_error_linear(double step) {
    const auto I = solve_mean_field(Kernel::exponential(1.0), TransferFunction::constant(1.0), 1.0, 1.0, 10.0, step,
                                    MeanFieldScheme::volterra_trapezoid);
    double err = 0;
    for (std::size_t m = 0; m < I.values.size(); ++m) {
        err = std::max(err, std::abs(I.values[m] - (1 - std::exp(-I.grid.time(m)))));
    }
    return err;
}

} // namespace

TEST_CASE("balanced signs give the zero solution") {
    const auto I = solve_mean_field(Kernel::exponential(1.0), TransferFunction::arctan(), 0.5, 0.7, 5.0, 5.0 / 512,
                                    MeanFieldScheme::volterra_trapezoid);
    CHECK(std::all_of(I.values.begin(), I.values.end(), [](double v) { return v == 0.0; }));
    CHECK(fixed_point(Kernel::exponential(1.0), TransferFunction::arctan(), 0.5, 0.3).value() == 0.0);
    CHECK(cross_validate_schemes(Kernel::exponential(1.0), TransferFunction::arctan(), 0.5, 0.3, 5.0, 5.0 / 256) ==
          0.0);
}

TEST_CASE("linear case against 1 - exp(-t)") {
    const double step = std::ldexp(1.0, -12);
    const auto I = solve_mean_field(Kernel::exponential(1.0), TransferFunction::constant(1.0), 1.0, 1.0, 1.0, step,
                                    MeanFieldScheme::volterra_trapezoid);
    CHECK(std::abs(I.back() - (1 - std::exp(-1.0))) < 1e-6);
    CHECK(I.metadata.scheme == "volterra_trapezoid");

    // Second order over four dyadic refinements.
    std::vector<double> errs;
    for (int k = 0; k < 5; ++k) {
        errs.push_back(max_error_linear(10.0 / (64 << k)));
    }
    for (int k = 0; k < 4; ++k) {
        const double order = std::log2(errs[k] / errs[k + 1]);
        CHECK(order >= 1.8);
        CHECK(order <= 2.2);
    }
}

TEST_CASE("long-time limit matches the bisection root") {
    const auto I = solve_mean_field(Kernel::exponential(1.0), TransferFunction::arctan(), 1.0, 0.5, 50.0, 50.0 / 8192,
                                    MeanFieldScheme::volterra_trapezoid);
    CHECK(std::abs(I.back() - bisect_arctan_root(0.5, 1.0)) < 1e-4);
}

TEST_CASE("fixed points") {
    const auto k = Kernel::exponential(2.0);
    CHECK(fixed_point(k, TransferFunction::constant(1.5), 0.9, 0.4).value() ==
          doctest::Approx(0.8 * 0.4 * 1.5 / 2.0).epsilon(1e-12));
    const auto r = fixed_point(Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5);
    CHECK(r.uniqueness_guaranteed);
    CHECK(r.value() == doctest::Approx(bisect_arctan_root(0.3, 1.0)).epsilon(1e-10));
    CHECK_THROWS_AS((void)fixed_point(Kernel::tabulated(0.1, {1, 0.5}, {0, 0}), TransferFunction::arctan(), 0.8, 0.5),
                    SchemeMismatchError);
}

TEST_CASE("schemes agree and behave") {
    CHECK(cross_validate_schemes(Kernel::exponential(1.0), TransferFunction::constant(1.0), 1.0, 1.0, 5.0,
                                 std::ldexp(1.0, -10)) < 1e-5);
    const auto rk = solve_mean_field(Kernel::exponential(1.0), TransferFunction::constant(1.0), 1.0, 1.0, 1.0,
                                     std::ldexp(1.0, -10), MeanFieldScheme::ode_rk4);
    CHECK(std::abs(rk.back() - (1 - std::exp(-1.0))) < 1e-10);

    // Monotone and non-negative for p > 1/2 with increasing h.
    const auto I = solve_mean_field(Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 5.0, 5.0 / 2048,
                                    MeanFieldScheme::volterra_trapezoid);
    CHECK(I.values.front() == 0.0);
    for (std::size_t m = 1; m < I.values.size(); ++m) {
        CHECK(I.values[m] >= I.values[m - 1]);
    }
}

TEST_CASE("initial sweep guess does not matter") {
    MeanFieldOptions zero;
    zero.initial_guess = MeanFieldOptions::InitialGuess::zero;
    const auto a = solve_mean_field(Kernel::exponential(1.0), TransferFunction::arctan(), 0.9, 0.6, 5.0, 5.0 / 1024,
                                    MeanFieldScheme::volterra_trapezoid);
    const auto b = solve_mean_field(Kernel::exponential(1.0), TransferFunction::arctan(), 0.9, 0.6, 5.0, 5.0 / 1024,
                                    MeanFieldScheme::volterra_trapezoid, zero);
    for (std::size_t m = 0; m < a.values.size(); ++m) {
        CHECK(std::abs(a.values[m] - b.values[m]) < 1e-10);
    }
}

TEST_CASE("tabulated kernel matches the exponential solution") {
    const double step = 5.0 / 1024;
    std::vector<double> v, d;
    for (int i = 0; i <= 1024; ++i) {
        v.push_back(std::exp(-i * step));
        d.push_back(-v.back());
    }
    const auto a = solve_mean_field(Kernel::tabulated(step, v, d), TransferFunction::arctan(), 0.8, 0.5, 5.0, step,
                                    MeanFieldScheme::volterra_trapezoid);
    const auto b = solve_mean_field(Kernel::exponential(1.0), TransferFunction::arctan(), 0.8, 0.5, 5.0, step,
                                    MeanFieldScheme::volterra_trapezoid);
    CHECK(std::abs(a.back() - b.back()) < 1e-12);
    CHECK_THROWS_AS((void)solve_mean_field(Kernel::tabulated(step, v, d), TransferFunction::arctan(), 0.8, 0.5, 5.0,
                                           step, MeanFieldScheme::ode_rk4),
                    SchemeMismatchError);
}

TEST_CASE("invalid inputs") {
    const auto k = Kernel::exponential(1.0);
    const auto h = TransferFunction::arctan();
    CHECK_THROWS_AS((void)solve_mean_field(k, h, 1.2, 0.5, 1.0, 0.01, MeanFieldScheme::volterra_trapezoid),
                    ParameterError);
    CHECK_THROWS_AS((void)solve_mean_field(k, h, 0.8, 0.5, 1.0, 0.3, MeanFieldScheme::volterra_trapezoid),
                    ParameterError);
    CHECK_THROWS_AS((void)solve_mean_field(k, TransferFunction::rectified_linear(0, 100), 1.0, 1.0, 1.0, 0.5,
                                           MeanFieldScheme::volterra_trapezoid),
                    StepSizeError);
}
