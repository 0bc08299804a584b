#include "hawkes_mf/kernels.hpp"

#include "hawkes_mf/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace hawkes_mf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double max_abs(const std::vector<double>& v) {
    double out = 0.0;
    for (double x : v) {
        out = std::max(out, std::abs(x));
    }
    return out;
}

// Locate t on a uniform grid: index of the left node and the weight of the right one.
// Nodes hit up to rounding are snapped so that interpolation returns the stored value.
std::pair<std::size_t, double> locate(double t, double step, std::size_t nodes) {
    const double x = t / step;
    double k = std::floor(x);
    double w = x - k;
    const double nearest = std::round(x);
    if (std::abs(x - nearest) < 1e-12 * std::max(1.0, x)) {
        k = nearest;
        w = 0.0;
    }
    auto idx = static_cast<std::size_t>(k);
    if (idx >= nodes - 1) {
        return {nodes - 2, w == 0.0 && idx == nodes - 1 ? 1.0 : w};
    }
    return {idx, w};
}

double interpolate(const std::vector<double>& v, std::size_t k, double w) {
    if (w == 0.0) {
        return v[k];
    }
    if (w == 1.0) {
        return v[k + 1];
    }
    return v[k] + w * (v[k + 1] - v[k]);
}

std::string format_number(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
}

} // namespace

Kernel::Kernel(Spec spec) : spec_(std::move(spec)) {
    std::visit(overloaded{
                   [this](const ExponentialKernel& k) {
                       sup_norm_ = 1.0;
                       deriv_sup_norm_ = k.rate;
                   },
                   [this](const TabulatedKernel& k) {
                       sup_norm_ = max_abs(k.values);
                       deriv_sup_norm_ = max_abs(k.derivatives);
                   },
               },
               spec_);
}

Kernel Kernel::exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw ParameterError("exponential kernel rate must be finite and > 0");
    }
    return Kernel(ExponentialKernel{rate});
}

Kernel Kernel::tabulated(double step, std::vector<double> values, std::vector<double> derivatives) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ParameterError("tabulated kernel step must be finite and > 0");
    }
    if (values.size() < 2) {
        throw ParameterError("tabulated kernel needs at least two nodes");
    }
    if (derivatives.size() != values.size()) {
        throw ParameterError("tabulated kernel needs one derivative per node");
    }
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!std::all_of(values.begin(), values.end(), finite) ||
        !std::all_of(derivatives.begin(), derivatives.end(), finite)) {
        throw ParameterError("tabulated kernel values must be finite");
    }
    return Kernel(TabulatedKernel{step, std::move(values), std::move(derivatives)});
}

double Kernel::operator()(double t) const {
    if (!(t >= 0.0)) {
        throw DomainError("kernel evaluated at negative time");
    }
    return std::visit(overloaded{
                          [t](const ExponentialKernel& k) { return std::exp(-k.rate * t); },
                          [t, this](const TabulatedKernel& k) {
                              if (t > support_end()) {
                                  throw DomainError("kernel evaluated beyond its tabulated range");
                              }
                              const auto [idx, w] = locate(t, k.step, k.values.size());
                              return interpolate(k.values, idx, w);
                          },
                      },
                      spec_);
}

double Kernel::derivative(double t) const {
    if (!(t >= 0.0)) {
        throw DomainError("kernel derivative evaluated at negative time");
    }
    return std::visit(overloaded{
                          [t](const ExponentialKernel& k) { return -k.rate * std::exp(-k.rate * t); },
                          [t, this](const TabulatedKernel& k) {
                              if (t > support_end()) {
                                  throw DomainError("kernel derivative evaluated beyond its tabulated range");
                              }
                              const auto [idx, w] = locate(t, k.step, k.derivatives.size());
                              return interpolate(k.derivatives, idx, w);
                          },
                      },
                      spec_);
}

double Kernel::rate() const {
    if (const auto* k = std::get_if<ExponentialKernel>(&spec_)) {
        return k->rate;
    }
    throw SchemeMismatchError("kernel is not exponential");
}

double Kernel::support_end() const noexcept {
    if (const auto* k = std::get_if<TabulatedKernel>(&spec_)) {
        return k->step * static_cast<double>(k->values.size() - 1);
    }
    return std::numeric_limits<double>::infinity();
}

double Kernel::truncation_age(double rel_tol) const {
    if (!(rel_tol > 0.0)) {
        return support_end();
    }
    return std::visit(overloaded{
                          [rel_tol](const ExponentialKernel& k) { return -std::log(rel_tol) / k.rate; },
                          [rel_tol, this](const TabulatedKernel& k) {
                              const double cut = rel_tol * sup_norm_;
                              std::size_t last = 0;
                              for (std::size_t i = 0; i < k.values.size(); ++i) {
                                  if (std::abs(k.values[i]) >= cut) {
                                      last = i;
                                  }
                              }
                              return std::min(support_end(), k.step * static_cast<double>(last + 1));
                          },
                      },
                      spec_);
}

std::string Kernel::id() const {
    return std::visit(overloaded{
                          [](const ExponentialKernel& k) { return "exponential(lambda=" + format_number(k.rate) + ")"; },
                          [](const TabulatedKernel& k) {
                              return "tabulated(step=" + format_number(k.step) +
                                     ",nodes=" + std::to_string(k.values.size()) + ")";
                          },
                      },
                      spec_);
}

double eval_kernel(const Kernel& kernel, double t) { return kernel(t); }

double convolve_with_jumps(const Kernel& kernel, double t, std::span<const double> times,
                           std::span<const double> sizes) {
    if (!sizes.empty() && sizes.size() != times.size()) {
        throw ContractError("jump sizes and jump times differ in length");
    }
    if (!std::is_sorted(times.begin(), times.end())) {
        throw ContractError("jump times must be sorted");
    }
    const auto end = std::lower_bound(times.begin(), times.end(), t);
    double total = 0.0;
    for (auto it = times.begin(); it != end; ++it) {
        const auto i = static_cast<std::size_t>(it - times.begin());
        total += kernel(t - *it) * (sizes.empty() ? 1.0 : sizes[i]);
    }
    return total;
}

double convolve_with_density(const Kernel& kernel, double step, std::span<const double> density, std::size_t m) {
    if (m >= density.size()) {
        throw ContractError("grid index outside the sampled density");
    }
    if (m == 0) {
        return 0.0;
    }
    const auto dm = static_cast<double>(m);
    double total = 0.5 * (kernel(dm * step) * density[0] + kernel(0.0) * density[m]);
    for (std::size_t i = 1; i < m; ++i) {
        total += kernel(static_cast<double>(m - i) * step) * density[i];
    }
    return step * total;
}

double convolve_with_increments(const Kernel& kernel, double step, std::span<const double> increments,
                                std::size_t m) {
    if (m > increments.size()) {
        throw ContractError("grid index beyond the increment sequence");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        total += kernel(static_cast<double>(m - i) * step) * increments[i];
    }
    return total;
}

// ---------------------------------------------------------------------------

TransferFunction::TransferFunction(Spec spec) : spec_(std::move(spec)) {
    std::visit(overloaded{
                   [this](const ArctanTransfer&) {
                       sup_norm_ = 2.0;
                       lipschitz_ = 2.0 / std::numbers::pi;
                       // max |h''| = (2/pi) * max 2|x| / (1+x^2)^2, attained at x = 1/sqrt(3)
                       derivative_lipschitz_ = 3.0 * std::sqrt(3.0) / (4.0 * std::numbers::pi);
                   },
                   [this](const ConstantTransfer& c) {
                       sup_norm_ = c.value;
                       lipschitz_ = 0.0;
                       derivative_lipschitz_ = 0.0;
                   },
                   [this](const TabulatedTransfer& t) {
                       sup_norm_ = max_abs(t.values);
                       double lip = 0.0;
                       for (std::size_t i = 1; i < t.values.size(); ++i) {
                           lip = std::max(lip, std::abs(t.values[i] - t.values[i - 1]) / t.step);
                       }
                       lipschitz_ = lip;
                   },
                   [this](const RectifiedLinearTransfer& r) {
                       sup_norm_ = r.slope == 0.0 ? std::max(0.0, r.base) : std::numeric_limits<double>::infinity();
                       lipschitz_ = std::abs(r.slope);
                   },
               },
               spec_);
}

TransferFunction TransferFunction::arctan() { return TransferFunction(ArctanTransfer{}); }

TransferFunction TransferFunction::constant(double value) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
        throw ParameterError("constant transfer value must be finite and >= 0");
    }
    return TransferFunction(ConstantTransfer{value});
}

TransferFunction TransferFunction::tabulated(double x_min, double step, std::vector<double> values) {
    if (!std::isfinite(x_min) || !(step > 0.0) || !std::isfinite(step)) {
        throw ParameterError("tabulated transfer needs finite x_min and step > 0");
    }
    if (values.size() < 2) {
        throw ParameterError("tabulated transfer needs at least two nodes");
    }
    for (double v : values) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ParameterError("tabulated transfer values must be finite and >= 0");
        }
    }
    return TransferFunction(TabulatedTransfer{x_min, step, std::move(values)});
}

TransferFunction TransferFunction::rectified_linear(double base, double slope) {
    if (!std::isfinite(base) || !std::isfinite(slope)) {
        throw ParameterError("rectified-linear transfer needs finite coefficients");
    }
    return TransferFunction(RectifiedLinearTransfer{base, slope});
}

double TransferFunction::operator()(double x) const {
    return std::visit(overloaded{
                          [x](const ArctanTransfer&) { return 1.0 + (2.0 / std::numbers::pi) * std::atan(x); },
                          [](const ConstantTransfer& c) { return c.value; },
                          [x](const TabulatedTransfer& t) {
                              const double x_max = t.x_min + t.step * static_cast<double>(t.values.size() - 1);
                              if (x <= t.x_min) {
                                  return t.values.front();
                              }
                              if (x >= x_max) {
                                  return t.values.back();
                              }
                              const auto [idx, w] = locate(x - t.x_min, t.step, t.values.size());
                              return interpolate(t.values, idx, w);
                          },
                          [x](const RectifiedLinearTransfer& r) { return std::max(0.0, r.base + r.slope * x); },
                      },
                      spec_);
}

bool TransferFunction::has_derivative() const noexcept {
    return std::holds_alternative<ArctanTransfer>(spec_) || std::holds_alternative<ConstantTransfer>(spec_);
}

double TransferFunction::derivative(double x) const {
    if (std::holds_alternative<ArctanTransfer>(spec_)) {
        return (2.0 / std::numbers::pi) / (1.0 + x * x);
    }
    if (std::holds_alternative<ConstantTransfer>(spec_)) {
        return 0.0;
    }
    throw CapabilityError("transfer function " + id() + " has no continuous derivative");
}

std::string TransferFunction::id() const {
    return std::visit(overloaded{
                          [](const ArctanTransfer&) { return std::string("arctan"); },
                          [](const ConstantTransfer& c) { return "constant(c=" + format_number(c.value) + ")"; },
                          [](const TabulatedTransfer& t) {
                              return "tabulated(x_min=" + format_number(t.x_min) + ",step=" + format_number(t.step) +
                                     ",nodes=" + std::to_string(t.values.size()) + ")";
                          },
                          [](const RectifiedLinearTransfer& r) {
                              return "rectified_linear(base=" + format_number(r.base) +
                                     ",slope=" + format_number(r.slope) + ")";
                          },
                      },
                      spec_);
}

} // namespace hawkes_mf
