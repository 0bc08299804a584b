#include "hawkes_mf/volterra.hpp"

#include "hawkes_mf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hawkes_mf {

std::string to_string(MeanFieldScheme scheme) {
    return scheme == MeanFieldScheme::ode_rk4 ? "ode_rk4" : "volterra_trapezoid";
}

namespace {

void check_inputs(double p, double q) {
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw ParameterError("p and q must lie in [0, 1]");
    }
}

std::vector<double> solve_trapezoid(const Kernel& kernel, const TransferFunction& h, double coupling,
                                    const TimeGrid& grid, const MeanFieldOptions& options) {
    const std::size_t points = grid.points();
    const double dt = grid.step();
    std::vector<double> lag(points);
    for (std::size_t k = 0; k < points; ++k) {
        lag[k] = kernel(static_cast<double>(k) * dt);
    }
    std::vector<double> values(points, 0.0);
    std::vector<double> rates(points, 0.0);
    rates[0] = h(0.0);
    const double diagonal = 0.5 * coupling * dt * lag[0];
    for (std::size_t m = 1; m < points; ++m) {
        double history = 0.5 * lag[m] * rates[0];
        for (std::size_t i = 1; i < m; ++i) {
            history += lag[m - i] * rates[i];
        }
        const double base = coupling * dt * history;

        double current = options.initial_guess == MeanFieldOptions::InitialGuess::previous ? values[m - 1] : 0.0;
        double relaxation = 1.0;
        double last_change = std::numeric_limits<double>::infinity();
        for (std::size_t it = 0; it < options.max_iterations; ++it) {
            const double target = base + diagonal * h(current);
            const double change = target - current;
            if (std::abs(change) > last_change) {
                relaxation *= 0.5;
            }
            last_change = std::abs(change);
            current += relaxation * change;
            if (std::abs(change) <= options.tolerance * std::max(1.0, std::abs(current))) {
                break;
            }
        }
        values[m] = current;
        rates[m] = h(current);
    }
    return values;
}

std::vector<double> solve_rk4(double rate, const TransferFunction& h, double coupling, const TimeGrid& grid) {
    const double dt = grid.step();
    const auto rhs = [&](double x) { return -rate * x + coupling * h(x); };
    std::vector<double> values(grid.points(), 0.0);
    for (std::size_t m = 1; m < values.size(); ++m) {
        const double x = values[m - 1];
        const double k1 = rhs(x);
        const double k2 = rhs(x + 0.5 * dt * k1);
        const double k3 = rhs(x + 0.5 * dt * k2);
        const double k4 = rhs(x + dt * k3);
        values[m] = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return values;
}

} // namespace

IntensityPath solve_mean_field(const Kernel& kernel, const TransferFunction& h, double p, double q, double horizon,
                               double step, MeanFieldScheme scheme, const MeanFieldOptions& options) {
    check_inputs(p, q);
    const TimeGrid grid = TimeGrid::from_step(horizon, step);
    const double coupling = (2.0 * p - 1.0) * q;

    IntensityPath path;
    path.grid = grid;
    path.metadata = {p, q, kernel.id(), h.id(), to_string(scheme)};

    if (scheme == MeanFieldScheme::ode_rk4) {
        if (!kernel.is_exponential()) {
            throw SchemeMismatchError("ode_rk4 requires an exponential kernel");
        }
        path.values = solve_rk4(kernel.rate(), h, coupling, grid);
        return path;
    }
    if (std::abs(coupling) * h.lipschitz() * kernel.sup_norm() * grid.step() >= 1.0) {
        throw StepSizeError("|(2p-1) q| h_Lip ||phi|| dt >= 1: implicit step is not contractive");
    }
    if (kernel.support_end() < horizon) {
        throw DomainError("tabulated kernel does not cover the horizon");
    }
    path.values = solve_trapezoid(kernel, h, coupling, grid, options);
    return path;
}

double FixedPointResult::value() const {
    if (roots.size() != 1) {
        throw StateError("fixed point is not unique: " + std::to_string(roots.size()) + " roots");
    }
    return roots.front();
}

FixedPointResult fixed_point(const Kernel& kernel, const TransferFunction& h, double p, double q) {
    check_inputs(p, q);
    const double rate = kernel.rate();
    const double coupling = (2.0 * p - 1.0) * q;

    FixedPointResult result;
    result.uniqueness_guaranteed = std::abs(coupling) * h.lipschitz() < rate;
    if (coupling == 0.0) {
        result.roots = {0.0};
        result.uniqueness_guaranteed = true;
        return result;
    }
    if (h.is_constant()) {
        result.roots = {coupling * h(0.0) / rate};
        result.uniqueness_guaranteed = true;
        return result;
    }

    double bound;
    if (std::isfinite(h.sup_norm())) {
        bound = std::abs(coupling) * h.sup_norm() / rate;
    } else if (result.uniqueness_guaranteed) {
        bound = std::abs(coupling) * h(0.0) / (rate - std::abs(coupling) * h.lipschitz());
    } else {
        throw ParameterError("unbounded h with |(2p-1) q| h_Lip >= lambda: no root bracket available");
    }
    bound = bound * 1.01 + 1e-9;

    const auto g = [&](double x) { return coupling * h(x) - rate * x; };
    const auto dg = [&](double x) { return coupling * h.derivative(x) - rate; };
    const bool newton = h.has_derivative();

    constexpr int kScan = 4096;
    const double width = 2.0 * bound / kScan;
    double left = -bound;
    double g_left = g(left);
    for (int k = 1; k <= kScan; ++k) {
        const double right = -bound + width * k;
        const double g_right = g(right);
        if (g_left == 0.0) {
            result.roots.push_back(left);
        } else if (g_left * g_right < 0.0) {
            double a = left, b = right, ga = g_left;
            double x = 0.5 * (a + b);
            for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
                const double gx = g(x);
                if (gx == 0.0) {
                    a = b = x;
                    break;
                }
                if ((gx < 0.0) == (ga < 0.0)) {
                    a = x;
                    ga = gx;
                } else {
                    b = x;
                }
                double next = 0.5 * (a + b);
                if (newton) {
                    const double slope = dg(x);
                    const double step_to = x - gx / slope;
                    if (slope != 0.0 && step_to > a && step_to < b) {
                        next = step_to;
                    }
                }
                x = next;
            }
            result.roots.push_back(a == b ? a : x);
        }
        left = right;
        g_left = g_right;
    }
    if (!result.uniqueness_guaranteed || result.roots.size() != 1) {
        result.warning = "uniqueness condition |(2p-1) q| h_Lip < lambda does not hold; returning all "
                         "bracketed roots of the scan (" + std::to_string(result.roots.size()) + ")";
    }
    return result;
}

double cross_validate_schemes(const Kernel& kernel, const TransferFunction& h, double p, double q, double horizon,
                              double step) {
    if (!kernel.is_exponential()) {
        throw SchemeMismatchError("scheme cross-validation requires an exponential kernel");
    }
    const auto a = solve_mean_field(kernel, h, p, q, horizon, step, MeanFieldScheme::volterra_trapezoid);
    const auto b = solve_mean_field(kernel, h, p, q, horizon, step, MeanFieldScheme::ode_rk4);
    double worst = 0.0;
    for (std::size_t m = 0; m < a.values.size(); ++m) {
        worst = std::max(worst, std::abs(a.values[m] - b.values[m]));
    }
    return worst;
}

std::vector<double> transfer_integral(const IntensityPath& path, const TransferFunction& h) {
    std::vector<double> rates(path.values.size());
    std::transform(path.values.begin(), path.values.end(), rates.begin(), [&](double x) { return h(x); });
    return cumulative_trapezoid(rates, path.grid.step());
}

} // namespace hawkes_mf
