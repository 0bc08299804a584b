#pragma once

#include "hawkes_mf/grid.hpp"
#include "hawkes_mf/kernels.hpp"

#include <string>
#include <vector>

namespace hawkes_mf {

enum class MeanFieldScheme { volterra_trapezoid, ode_rk4 };

[[nodiscard]] std::string to_string(MeanFieldScheme scheme);

struct MeanFieldOptions {
    std::size_t max_iterations{50};
    double tolerance{1e-13};
    /// Starting value of the implicit sweep at step m: I_{m-1} or 0.
    enum class InitialGuess { previous, zero } initial_guess{InitialGuess::previous};
};

/// Solves I_t = (2p-1) q int_0^t phi(t-s) h(I_s) ds on the uniform grid of the
/// given step. The trapezoid scheme resolves the implicit diagonal term with
/// damped fixed-point sweeps; ode_rk4 integrates dI/dt = -lambda I + (2p-1) q h(I)
/// and needs an exponential kernel.
[[nodiscard]] IntensityPath solve_mean_field(const Kernel& kernel, const TransferFunction& h, double p, double q,
                                             double horizon, double step, MeanFieldScheme scheme,
                                             const MeanFieldOptions& options = {});

struct FixedPointResult {
    std::vector<double> roots;
    /// |(2p-1) q| h_Lip < lambda, which makes the root unique.
    bool uniqueness_guaranteed{false};
    std::string warning;

    /// The root when exactly one was found; throws StateError otherwise.
    [[nodiscard]] double value() const;
};

/// Equilibrium of the exponential-kernel ODE: roots of lambda x = (2p-1) q h(x).
[[nodiscard]] FixedPointResult fixed_point(const Kernel& kernel, const TransferFunction& h, double p, double q);

/// max over the grid of |trapezoid - rk4|.
[[nodiscard]] double cross_validate_schemes(const Kernel& kernel, const TransferFunction& h, double p, double q,
                                            double horizon, double step);

/// Cumulative trapezoid of h(I_t) on the path grid.
[[nodiscard]] std::vector<double> transfer_integral(const IntensityPath& path, const TransferFunction& h);

} // namespace hawkes_mf
