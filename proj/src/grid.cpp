#include "hawkes_mf/grid.hpp"

#include "hawkes_mf/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hawkes_mf {

TimeGrid TimeGrid::from_step(double horizon, double step) {
    if (!(horizon >= 0.0) || !std::isfinite(horizon)) {
        throw ParameterError("horizon must be finite and >= 0");
    }
    if (!(step > 0.0)) {
        throw ParameterError("grid step must be > 0");
    }
    if (horizon == 0.0) {
        return {0.0, 0};
    }
    const double ratio = horizon / step;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        throw ParameterError("horizon must be a positive integer multiple of the grid step");
    }
    return {horizon, static_cast<std::size_t>(rounded)};
}

std::size_t TimeGrid::nearest(double t) const noexcept {
    if (intervals == 0 || t <= 0.0) {
        return 0;
    }
    if (t >= horizon) {
        return intervals;
    }
    const double m = std::round(t / horizon * static_cast<double>(intervals));
    return std::min(intervals, static_cast<std::size_t>(m));
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& values, double step) {
    std::vector<double> out(values.size(), 0.0);
    for (std::size_t m = 1; m < values.size(); ++m) {
        out[m] = out[m - 1] + 0.5 * step * (values[m - 1] + values[m]);
    }
    return out;
}

} // namespace hawkes_mf
