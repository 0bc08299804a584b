#pragma once

#include "hawkes_mf/grid.hpp"
#include "hawkes_mf/kernels.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hawkes_mf {

struct FluctuationOptions {
    /// Debug hook: force W = 0 and B = 0 in the common driver.
    bool zero_common_noise{false};
    /// Multiplies every driver increment of Gbar and of the vertex terms.
    double driver_scale{1.0};
};

/// One draw of the limiting fluctuation system on the grid of I.
struct FluctuationSample {
    TimeGrid grid;
    std::vector<double> Kbar;
    /// K[k][m] for the n tracked vertices.
    std::vector<std::vector<double>> K;
    /// Increments of Gbar; Kbar is their causal convolution with phi.
    std::vector<double> dGbar;
    double W{0.0};
    std::vector<double> W_tilde;
    std::vector<double> dB;
    std::vector<std::vector<double>> dB_tilde;
    std::uint64_t seed{0};
};

/// Euler-Maruyama for
///   dGbar = q (W h(I) + (2p-1) h'(I) Kbar) dt + q sqrt(h(I)) dB,
///   G^k = Gbar + sqrt(q(1-q)) (int Wt^k h(I) ds + int sqrt(h(I)) dBt^k),
/// with Kbar_m = sum_{i<m} phi((m-i) dt) dGbar_i (left points, Ito) and
/// K^k the same convolution of dG^k. Throws CapabilityError without h'.
[[nodiscard]] FluctuationSample simulate_fluctuations(const IntensityPath& I, const Kernel& kernel,
                                                      const TransferFunction& h, double p, double q, std::size_t n,
                                                      std::uint64_t seed, const FluctuationOptions& options = {});

/// Terminal values of many independent samples plus the limit of the
/// centred total count, int h'(I) Kbar ds + int sqrt(h(I)) dB0, where B0 has
/// correlation 2p-1 with the B driving Kbar.
struct FluctuationEnsemble {
    TimeGrid grid;
    std::size_t n{0};
    /// samples x (n+1): Kbar_T, K^1_T .. K^n_T.
    std::vector<std::vector<double>> terminal;
    std::vector<double> total_count_limit;
    /// Realized W and Wt^k per sample (for driver independence checks).
    std::vector<double> W;
    std::vector<std::vector<double>> W_tilde;
    std::vector<std::uint64_t> seeds;
};

[[nodiscard]] FluctuationEnsemble sample_fluctuation_ensemble(const IntensityPath& I, const Kernel& kernel,
                                                              const TransferFunction& h, double p, double q,
                                                              std::size_t n, std::size_t samples,
                                                              std::uint64_t master_seed, std::size_t jobs = 1);

struct CovarianceEstimate {
    std::size_t dimension{0};
    std::size_t samples{0};
    std::vector<double> mean;
    /// Row-major dimension x dimension.
    std::vector<double> covariance;
    /// Jackknife standard errors of each covariance entry.
    std::vector<double> standard_error;

    [[nodiscard]] double cov(std::size_t a, std::size_t b) const { return covariance.at(a * dimension + b); }
    [[nodiscard]] double se(std::size_t a, std::size_t b) const { return standard_error.at(a * dimension + b); }
};

/// Unbiased covariance of (Kbar_t, K^1_t .. K^n_t) at the grid node nearest t.
/// Throws ContractError unless all samples share one grid and n.
[[nodiscard]] CovarianceEstimate covariance_matrix(const std::vector<FluctuationSample>& samples, double t);

/// Same estimator on rows of raw observations (rows = samples).
[[nodiscard]] CovarianceEstimate covariance_of_rows(const std::vector<std::vector<double>>& rows);

} // namespace hawkes_mf
