#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hawkes_mf {

struct ExponentialKernel {
    double rate{1.0};
};

/// phi and phi' sampled on a uniform grid over [0, step * (values.size() - 1)].
struct TabulatedKernel {
    double step{0.0};
    std::vector<double> values;
    std::vector<double> derivatives;
};

/// Interaction kernel phi in C_b^1([0, inf)).
class Kernel {
public:
    using Spec = std::variant<ExponentialKernel, TabulatedKernel>;

    [[nodiscard]] static Kernel exponential(double rate);
    [[nodiscard]] static Kernel tabulated(double step, std::vector<double> values, std::vector<double> derivatives);

    /// phi(t). Exact for the exponential kind, linear interpolation for tabulated.
    [[nodiscard]] double operator()(double t) const;
    [[nodiscard]] double derivative(double t) const;

    [[nodiscard]] double sup_norm() const noexcept { return sup_norm_; }
    [[nodiscard]] double derivative_sup_norm() const noexcept { return deriv_sup_norm_; }

    [[nodiscard]] bool is_exponential() const noexcept { return std::holds_alternative<ExponentialKernel>(spec_); }
    /// Decay rate lambda; throws SchemeMismatchError for non-exponential kernels.
    [[nodiscard]] double rate() const;
    /// Right end of the domain (infinity for exponential).
    [[nodiscard]] double support_end() const noexcept;
    /// Smallest age beyond which |phi| stays below rel_tol * sup_norm, capped at support_end().
    [[nodiscard]] double truncation_age(double rel_tol) const;

    [[nodiscard]] const Spec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::string id() const;

private:
    explicit Kernel(Spec spec);

    Spec spec_;
    double sup_norm_{0.0};
    double deriv_sup_norm_{0.0};
};

/// Free-function form of Kernel::operator().
[[nodiscard]] double eval_kernel(const Kernel& kernel, double t);

/// sum over events s < t of phi(t - s) * size; events at or after t are excluded.
/// `sizes` empty means unit jumps. Throws ContractError for unsorted times.
[[nodiscard]] double convolve_with_jumps(const Kernel& kernel, double t, std::span<const double> times,
                                         std::span<const double> sizes = {});

/// Trapezoid rule for int_0^{t_m} phi(t_m - s) g(s) ds with g sampled at step.
[[nodiscard]] double convolve_with_density(const Kernel& kernel, double step, std::span<const double> density,
                                           std::size_t m);

/// Causal Stieltjes sum  sum_{i < m} phi(t_m - t_i) dG_i  where dG_i = G(t_{i+1}) - G(t_i).
[[nodiscard]] double convolve_with_increments(const Kernel& kernel, double step, std::span<const double> increments,
                                              std::size_t m);

struct ArctanTransfer {};
struct ConstantTransfer {
    double value{1.0};
};
/// Piecewise-linear h through (x_min + k * step, values[k]); constant beyond the ends.
struct TabulatedTransfer {
    double x_min{0.0};
    double step{1.0};
    std::vector<double> values;
};
/// h(x) = max(0, base + slope * x). Unbounded, so not usable by the thinning simulators.
struct RectifiedLinearTransfer {
    double base{1.0};
    double slope{1.0};
};

/// Non-negative Lipschitz transfer function h.
class TransferFunction {
public:
    using Spec = std::variant<ArctanTransfer, ConstantTransfer, TabulatedTransfer, RectifiedLinearTransfer>;

    /// h(x) = 1 + (2/pi) arctan(x).
    [[nodiscard]] static TransferFunction arctan();
    [[nodiscard]] static TransferFunction constant(double value);
    [[nodiscard]] static TransferFunction tabulated(double x_min, double step, std::vector<double> values);
    [[nodiscard]] static TransferFunction rectified_linear(double base, double slope);

    [[nodiscard]] double operator()(double x) const;

    [[nodiscard]] bool has_derivative() const noexcept;
    /// h'(x); throws CapabilityError when h is not C^1.
    [[nodiscard]] double derivative(double x) const;

    [[nodiscard]] double sup_norm() const noexcept { return sup_norm_; }
    [[nodiscard]] double lipschitz() const noexcept { return lipschitz_; }
    [[nodiscard]] std::optional<double> derivative_lipschitz() const noexcept { return derivative_lipschitz_; }
    [[nodiscard]] bool is_constant() const noexcept { return std::holds_alternative<ConstantTransfer>(spec_); }

    [[nodiscard]] const Spec& spec() const noexcept { return spec_; }
    [[nodiscard]] std::string id() const;

private:
    explicit TransferFunction(Spec spec);

    Spec spec_;
    double sup_norm_{0.0};
    double lipschitz_{0.0};
    std::optional<double> derivative_lipschitz_;
};

} // namespace hawkes_mf
