#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace hawkes_mf {

/// Uniform grid 0 = t_0 < ... < t_M = horizon. The last node is exactly the
/// horizon, never horizon +- rounding.
struct TimeGrid {
    double horizon{0.0};
    std::size_t intervals{0};

    /// Grid for a requested step; throws ParameterError unless horizon is an
    /// integer multiple of step (relative tolerance 1e-9).
    [[nodiscard]] static TimeGrid from_step(double horizon, double step);

    [[nodiscard]] std::size_t points() const noexcept { return intervals + 1; }
    [[nodiscard]] double step() const noexcept {
        return intervals == 0 ? 0.0 : horizon / static_cast<double>(intervals);
    }
    [[nodiscard]] double time(std::size_t m) const noexcept {
        if (m >= intervals) {
            return horizon;
        }
        return horizon * static_cast<double>(m) / static_cast<double>(intervals);
    }
    /// Index of the node nearest to t (clamped to the grid).
    [[nodiscard]] std::size_t nearest(double t) const noexcept;

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;
};

struct PathMetadata {
    double p{0.0};
    double q{0.0};
    std::string kernel;
    std::string transfer;
    std::string scheme;
};

/// A real function of time sampled on a TimeGrid.
struct IntensityPath {
    TimeGrid grid;
    std::vector<double> values;
    PathMetadata metadata;

    [[nodiscard]] double back() const { return values.back(); }
};

/// Cumulative trapezoid integral of sampled values; result[0] = 0.
[[nodiscard]] std::vector<double> cumulative_trapezoid(const std::vector<double>& values, double step);

} // namespace hawkes_mf
