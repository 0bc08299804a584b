#pragma once

#include "hawkes_mf/grid.hpp"
#include "hawkes_mf/kernels.hpp"
#include "hawkes_mf/network.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace hawkes_mf {

/// theta_N = 1/N (mean field) or 1/sqrt(N) (critical, p = 1/2).
enum class Scaling { mean_field, critical };
enum class Backend { thinning, time_change };
/// `automatic` uses the O(1)-decay state for exponential kernels and the event
/// history otherwise; `history` forces recomputation from the history.
enum class KernelPath { automatic, history };

[[nodiscard]] double scaling_factor(Scaling scaling, std::size_t n);
[[nodiscard]] std::string to_string(Scaling scaling);
[[nodiscard]] std::string to_string(Backend backend);
[[nodiscard]] Scaling parse_scaling(const std::string& name);
[[nodiscard]] Backend parse_backend(const std::string& name);

struct SimulationConfig {
    double horizon{1.0};
    Scaling scaling{Scaling::mean_field};
    /// Record-grid step; 0 selects horizon / 2048.
    double record_step{0.0};
    std::vector<std::size_t> tracked;
    std::uint64_t seed{0};
    /// Record I^{N,i} of every vertex on the grid (needed for martingale extraction).
    bool record_full{false};
    KernelPath kernel_path{KernelPath::automatic};
    /// History entries are dropped once |phi(age)| < tolerance * ||phi||.
    double history_tolerance{1e-12};
};

/// Per-vertex event times, strictly increasing, all in [0, horizon).
struct SpikeTrains {
    std::vector<std::vector<double>> times;

    [[nodiscard]] std::size_t total_events() const noexcept;
    /// Number of events of `vertex` strictly before t.
    [[nodiscard]] std::size_t count_before(std::size_t vertex, double t) const;
};

struct SimulationDiagnostics {
    std::size_t candidates{0};
    std::size_t accepted{0};
    /// Candidate times that collided in floating point and were moved by one ulp.
    std::size_t tie_incidents{0};
    double max_acceptance_ratio{0.0};
};

struct SimulationResult {
    SpikeTrains trains;
    TimeGrid grid;
    double theta{0.0};
    std::vector<std::size_t> tracked;
    /// tracked_paths[k][m] = I^{N, tracked[k]}(t_m -).
    std::vector<std::vector<double>> tracked_paths;
    /// Row-major points x n when record_full, otherwise empty.
    std::vector<double> full_paths;
    /// I^{N,i}(horizon -) for every vertex.
    std::vector<double> final_intensity;
    SimulationDiagnostics diagnostics;

    [[nodiscard]] bool has_full_paths() const noexcept { return !full_paths.empty(); }
    [[nodiscard]] double full(std::size_t m, std::size_t vertex) const noexcept {
        return full_paths[m * final_intensity.size() + vertex];
    }
};

/// Lewis/Ogata thinning with envelope N ||h||: candidates of a rate-N||h||
/// Poisson process get a uniform vertex i and are kept with probability
/// h(I^{N,i}(t-)) / ||h||.
[[nodiscard]] SimulationResult simulate_thinning(const NetworkConfiguration& net, const Kernel& kernel,
                                                 const TransferFunction& h, const SimulationConfig& config);

/// Per-vertex construction: vertex i owns an independent rate-||h|| Poisson
/// clock and mark stream (its unit-rate clock Y_i run at speed ||h||); a tick at
/// t becomes an event of Z^i with probability h(I^{N,i}(t-)) / ||h||. Same law
/// as simulate_thinning, different use of randomness.
[[nodiscard]] SimulationResult simulate_time_change(const NetworkConfiguration& net, const Kernel& kernel,
                                                    const TransferFunction& h, const SimulationConfig& config);

[[nodiscard]] SimulationResult simulate(const NetworkConfiguration& net, const Kernel& kernel,
                                        const TransferFunction& h, const SimulationConfig& config, Backend backend);

/// Quadratic covariations between the idiosyncratic martingales of two tracked
/// vertices k, l, from exact predictable form to its two approximations.
struct CovariationSeries {
    std::size_t k{0};
    std::size_t l{0};
    /// (1/N) sum_j (V_jk - q)(V_jl - q) int_0^t h(I^{N,j})
    std::vector<double> predictable;
    /// (1/N) sum_j (V_jk - q)(V_jl - q) int_0^t hbar
    std::vector<double> mean_rate;
    /// 1{k=l} q (1-q) int_0^t hbar
    std::vector<double> limit;
    /// (1/N) sum_j (V_jk - q)(V_jl - q) Z^j_t  (sum of squared jumps)
    std::vector<double> realized;
};

/// Compensated paths on the record grid. Compensators int_0^t h(I^{N,j}) use the
/// trapezoid rule; counts are left limits Z^j(t_m -).
struct MartingalePaths {
    TimeGrid grid;
    std::vector<std::size_t> vertices;
    /// (1/sqrt N) X^{N,0} = (1/sqrt N) sum_j (Z^j - C^j)
    std::vector<double> total;
    /// (1/sqrt N) X^{N,U} = (1/sqrt N) sum_j U_j (Z^j - C^j)
    std::vector<double> common;
    /// (1/N) sum_j (Z^j - C^j)
    std::vector<double> mean_compensated;
    /// Mtilde^k = (1/sqrt N) sum_j U_j (V_jk - q)(Z^j - C^j)
    std::vector<std::vector<double>> idiosyncratic;
    /// M^k = Mtilde^k + q * common
    std::vector<std::vector<double>> vertex;
    /// theta_N sum_j U_j V_jk C^j
    std::vector<std::vector<double>> drift;
    /// hbar(t_m) = (1/N) sum_j h(I^{N,j}(t_m))
    std::vector<double> mean_rate;
    std::vector<double> mean_rate_integral;
    /// One entry per pair k <= l of `vertices`.
    std::vector<CovariationSeries> covariations;
};

/// Throws StateError unless the run recorded full paths.
[[nodiscard]] MartingalePaths extract_martingale_paths(const SimulationResult& run, const NetworkConfiguration& net,
                                                       const TransferFunction& h,
                                                       std::span<const std::size_t> vertices);

} // namespace hawkes_mf
