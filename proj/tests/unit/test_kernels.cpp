#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace hawkes_mf;

TEST_CASE("exponential kernel values") {
    CHECK(Kernel::exponential(1.0)(0.0) == 1.0);
    CHECK(Kernel::exponential(2.0)(std::log(2.0) / 2.0) == doctest::Approx(0.5).epsilon(1e-15));
    const auto k = Kernel::exponential(3.0);
    CHECK(k.derivative(0.5) == doctest::Approx(-3.0 * std::exp(-1.5)));
    CHECK(k.sup_norm() == 1.0);
    CHECK(k.derivative_sup_norm() == 3.0);
    CHECK(k.rate() == 3.0);
    CHECK_THROWS_AS((void)k(-0.1), DomainError);
    CHECK_THROWS_AS((void)Kernel::exponential(0.0), ParameterError);
}

TEST_CASE("tabulated kernel interpolates and is exact at nodes") {
    const double step = 0.01;
    std::vector<double> v, d;
    for (int i = 0; i <= 500; ++i) {
        v.push_back(std::exp(-i * step));
        d.push_back(-std::exp(-i * step));
    }
    const auto k = Kernel::tabulated(step, v, d);
    CHECK(k(0.37) == v[37]);
    CHECK(k(0.375) == doctest::Approx(0.5 * (v[37] + v[38])));
    CHECK(std::abs(k(0.375) - std::exp(-0.375)) < step * step);
    CHECK(k.sup_norm() == doctest::Approx(1.0));
    CHECK_FALSE(k.is_exponential());
    CHECK_THROWS_AS((void)k.rate(), SchemeMismatchError);
    CHECK_THROWS_AS((void)Kernel::tabulated(step, {1.0, 0.5}, {0.0}), ParameterError);
}

TEST_CASE("convolution with jumps is a strict left-limit sum") {
    const auto k = Kernel::exponential(1.0);
    const std::vector<double> none;
    CHECK(convolve_with_jumps(k, 3.0, none) == 0.0);
    const std::vector<double> one{0.4};
    CHECK(convolve_with_jumps(k, 1.0, one) == doctest::Approx(std::exp(-0.6)));
    const std::vector<double> two{0.2, 0.7};
    CHECK(convolve_with_jumps(k, 1.0, two) == doctest::Approx(std::exp(-0.8) + std::exp(-0.3)).epsilon(1e-15));
    // The event at exactly t does not count.
    CHECK(convolve_with_jumps(k, 0.7, two) == doctest::Approx(std::exp(-0.5)));
    const std::vector<double> sizes{2.0, -1.0};
    CHECK(convolve_with_jumps(k, 1.0, two, sizes) ==
          doctest::Approx(2 * std::exp(-0.8) - std::exp(-0.3)));
    const std::vector<double> unsorted{0.7, 0.2};
    CHECK_THROWS_AS((void)convolve_with_jumps(k, 1.0, unsorted), ContractError);
}

TEST_CASE("exponential semigroup property") {
    const double lambda = 1.7;
    const auto k = Kernel::exponential(lambda);
    const std::vector<double> ev{0.1, 0.35, 0.9, 1.2, 1.45};
    const double t = 1.0, delta = 0.5;
    double later = std::exp(-lambda * delta) * convolve_with_jumps(k, t, ev);
    for (double s : ev) {
        if (s >= t && s < t + delta) {
            later += std::exp(-lambda * (t + delta - s));
        }
    }
    CHECK(std::abs(later - convolve_with_jumps(k, t + delta, ev)) < 1e-15);
}

TEST_CASE("density and increment convolutions") {
    const auto k = Kernel::exponential(1.0);
    const double step = 1.0 / 1024;
    const std::size_t m = 1024;
    std::vector<double> ones(m + 1, 1.0);
    // int_0^1 e^{-(1-s)} ds = 1 - e^{-1}
    CHECK(convolve_with_density(k, step, ones, m) == doctest::Approx(1 - std::exp(-1.0)).epsilon(1e-6));
    std::vector<double> inc(m, step);
    double direct = 0;
    for (std::size_t i = 0; i < m; ++i) {
        direct += std::exp(-static_cast<double>(m - i) * step) * step;
    }
    CHECK(convolve_with_increments(k, step, inc, m) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("transfer functions") {
    const auto h = TransferFunction::arctan();
    CHECK(h(0.0) == 1.0);
    CHECK(h(1.0) == doctest::Approx(1.5));
    CHECK(h.derivative(0.0) == doctest::Approx(2 / std::numbers::pi));
    CHECK(h.sup_norm() == 2.0);
    CHECK(h.lipschitz() == doctest::Approx(2 / std::numbers::pi));

    const auto c = TransferFunction::constant(1.5);
    CHECK(c(-10) == 1.5);
    CHECK(c.derivative(3) == 0.0);
    CHECK(c.is_constant());

    const auto t = TransferFunction::tabulated(-1.0, 0.5, {0.0, 1.0, 2.0, 2.0});
    CHECK(t(-2.0) == 0.0);
    CHECK(t(-0.75) == doctest::Approx(0.5));
    CHECK(t(5.0) == 2.0);
    CHECK_FALSE(t.has_derivative());
    CHECK_THROWS_AS((void)t.derivative(0.0), CapabilityError);

    const auto r = TransferFunction::rectified_linear(1.0, 2.0);
    CHECK(r(-1.0) == 0.0);
    CHECK(r(1.0) == 3.0);
    CHECK(std::isinf(r.sup_norm()));
    CHECK_THROWS_AS((void)TransferFunction::constant(-1.0), ParameterError);
}

TEST_CASE("convolution bound: the squared constant holds where the linear one can fail") {
    // J drops to -1 at time 0 and jumps to +1 just before t = 1, so sup J^2 = 1.
    const auto k = Kernel::exponential(1.0);
    const std::vector<double> times{0.0, 0.999};
    const std::vector<double> sizes{-1.0, 2.0};
    const double t = 1.0;
    const double value = convolve_with_jumps(k, t, times, sizes);
    const double C = k.sup_norm() + t * k.derivative_sup_norm();
    CHECK(value * value > C);
    CHECK(value * value <= C * C);
}
