#include "hawkes_mf/fluctuations.hpp"

#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/parallel.hpp"
#include "hawkes_mf/random.hpp"

#include <cmath>

namespace hawkes_mf {

namespace {

// Causal convolution of grid increments, K_m = sum_{i<m} phi((m-i) dt) dG_i.
// The exponential kernel uses the one-step recursion; other kernels a lag table.
class CausalConvolution {
public:
    CausalConvolution(const Kernel& kernel, const TimeGrid& grid) : exponential_(kernel.is_exponential()) {
        const double dt = grid.step();
        if (exponential_) {
            decay_ = std::exp(-kernel.rate() * dt);
            phi0_ = kernel(0.0);
        } else {
            lags_.resize(grid.points());
            for (std::size_t l = 0; l < lags_.size(); ++l) {
                lags_[l] = kernel(static_cast<double>(l) * dt);
            }
        }
    }

    // Value at node m given increments dG_0..dG_{m-1} and the value at m-1.
    [[nodiscard]] double next(std::size_t m, double previous, const std::vector<double>& dG) const {
        if (m == 0) {
            return 0.0;
        }
        if (exponential_) {
            return decay_ * (previous + phi0_ * dG[m - 1]);
        }
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            total += lags_[m - i] * dG[i];
        }
        return total;
    }

private:
    bool exponential_;
    double decay_{0.0};
    double phi0_{0.0};
    std::vector<double> lags_;
};

void validate(const IntensityPath& I, const TransferFunction& h, double p, double q) {
    if (!h.has_derivative()) {
        throw CapabilityError("fluctuation limit needs h'; transfer " + h.id() + " has no derivative");
    }
    if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0)) {
        throw ParameterError("p and q must lie in [0, 1]");
    }
    if (I.values.size() != I.grid.points() || I.grid.intervals == 0) {
        throw ContractError("intensity path must cover a non-trivial grid");
    }
}

struct Drawn {
    FluctuationSample sample;
    double total_count_limit{0.0};
};

Drawn draw(const IntensityPath& I, const Kernel& kernel, const TransferFunction& h, double p, double q,
           std::size_t n, std::uint64_t seed, const FluctuationOptions& options, bool with_total) {
    validate(I, h, p, q);
    const TimeGrid& grid = I.grid;
    const std::size_t M = grid.intervals;
    const double dt = grid.step();
    const double root_dt = std::sqrt(dt);
    const double c = 2.0 * p - 1.0;
    const double idio = std::sqrt(q * (1.0 - q));
    const double scale = options.driver_scale;
    const CausalConvolution conv(kernel, grid);

    Drawn out;
    auto& s = out.sample;
    s.grid = grid;
    s.seed = seed;
    s.Kbar.assign(M + 1, 0.0);
    s.dGbar.assign(M, 0.0);
    s.dB.assign(M, 0.0);

    std::vector<double> rate(M + 1), root_rate(M + 1), slope(M + 1);
    for (std::size_t m = 0; m <= M; ++m) {
        rate[m] = h(I.values[m]);
        root_rate[m] = std::sqrt(std::max(rate[m], 0.0));
        slope[m] = h.derivative(I.values[m]);
    }

    RandomStream common(seed, StreamPurpose::fluctuation_common);
    s.W = std::sqrt(4.0 * p * (1.0 - p)) * common.normal();
    for (std::size_t m = 0; m < M; ++m) {
        s.dB[m] = root_dt * common.normal();
    }
    if (options.zero_common_noise) {
        s.W = 0.0;
        std::fill(s.dB.begin(), s.dB.end(), 0.0);
    }

    for (std::size_t m = 0; m < M; ++m) {
        s.Kbar[m] = conv.next(m, m > 0 ? s.Kbar[m - 1] : 0.0, s.dGbar);
        s.dGbar[m] = q * ((scale * s.W * rate[m] + c * slope[m] * s.Kbar[m]) * dt + scale * root_rate[m] * s.dB[m]);
    }
    s.Kbar[M] = conv.next(M, s.Kbar[M - 1], s.dGbar);

    s.W_tilde.assign(n, 0.0);
    s.dB_tilde.assign(n, std::vector<double>(M, 0.0));
    s.K.assign(n, std::vector<double>(M + 1, 0.0));
    std::vector<double> dH(M);
    for (std::size_t k = 0; k < n; ++k) {
        RandomStream vertex(seed, StreamPurpose::fluctuation_vertex, static_cast<std::uint32_t>(k));
        s.W_tilde[k] = vertex.normal();
        auto& dBk = s.dB_tilde[k];
        for (std::size_t m = 0; m < M; ++m) {
            dBk[m] = root_dt * vertex.normal();
            dH[m] = idio * scale * (s.W_tilde[k] * rate[m] * dt + root_rate[m] * dBk[m]);
        }
        // K^k = Kbar + conv(dH^k); at q = 1, dH^k = 0 and the paths coincide exactly.
        double H = 0.0;
        for (std::size_t m = 0; m <= M; ++m) {
            H = conv.next(m, H, dH);
            s.K[k][m] = s.Kbar[m] + H;
        }
    }

    if (with_total) {
        RandomStream coupled(seed, StreamPurpose::fluctuation_coupled);
        const double rho = c;
        const double rho_perp = std::sqrt(std::max(0.0, 1.0 - rho * rho));
        double total = 0.0;
        for (std::size_t m = 0; m < M; ++m) {
            const double dB0 = rho * s.dB[m] + rho_perp * root_dt * coupled.normal();
            total += slope[m] * s.Kbar[m] * dt + root_rate[m] * dB0;
        }
        out.total_count_limit = total;
    }
    return out;
}

} // namespace

FluctuationSample simulate_fluctuations(const IntensityPath& I, const Kernel& kernel, const TransferFunction& h,
                                        double p, double q, std::size_t n, std::uint64_t seed,
                                        const FluctuationOptions& options) {
    return draw(I, kernel, h, p, q, n, seed, options, false).sample;
}

FluctuationEnsemble sample_fluctuation_ensemble(const IntensityPath& I, const Kernel& kernel,
                                                const TransferFunction& h, double p, double q, std::size_t n,
                                                std::size_t samples, std::uint64_t master_seed, std::size_t jobs) {
    validate(I, h, p, q);
    FluctuationEnsemble ens;
    ens.grid = I.grid;
    ens.n = n;
    ens.terminal.assign(samples, {});
    ens.total_count_limit.assign(samples, 0.0);
    ens.W.assign(samples, 0.0);
    ens.W_tilde.assign(samples, {});
    ens.seeds.resize(samples);
    for (std::size_t r = 0; r < samples; ++r) {
        ens.seeds[r] = derive_seed(master_seed, static_cast<std::uint32_t>(StreamPurpose::fluctuation_common), r);
    }
    parallel_for(samples, jobs, [&](std::size_t r) {
        auto drawn = draw(I, kernel, h, p, q, n, ens.seeds[r], {}, true);
        const auto& s = drawn.sample;
        std::vector<double> row;
        row.reserve(n + 1);
        row.push_back(s.Kbar.back());
        for (const auto& path : s.K) {
            row.push_back(path.back());
        }
        ens.terminal[r] = std::move(row);
        ens.total_count_limit[r] = drawn.total_count_limit;
        ens.W[r] = s.W;
        ens.W_tilde[r] = s.W_tilde;
    });
    return ens;
}

CovarianceEstimate covariance_of_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.size() < 2) {
        throw ParameterError("covariance needs at least 2 samples");
    }
    const std::size_t d = rows.front().size();
    for (const auto& row : rows) {
        if (row.size() != d) {
            throw ContractError("covariance rows differ in length");
        }
    }
    const std::size_t n = rows.size();
    const auto dn = static_cast<double>(n);
    CovarianceEstimate est;
    est.dimension = d;
    est.samples = n;
    est.mean.assign(d, 0.0);
    for (const auto& row : rows) {
        for (std::size_t a = 0; a < d; ++a) {
            est.mean[a] += row[a];
        }
    }
    for (auto& m : est.mean) {
        m /= dn;
    }
    est.covariance.assign(d * d, 0.0);
    est.standard_error.assign(d * d, 0.0);
    // Jackknife in O(n) per entry: on centred data with S = sum x y, dropping
    // point r leaves a centred cross-product sum S - x_r y_r (1 + 1/(n-1)).
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            double S = 0.0;
            for (const auto& row : rows) {
                S += (row[a] - est.mean[a]) * (row[b] - est.mean[b]);
            }
            const double full = S / (dn - 1.0);
            double se = 0.0;
            if (n > 2) {
                std::vector<double> loo(n);
                double loo_mean = 0.0;
                for (std::size_t r = 0; r < n; ++r) {
                    const double x = rows[r][a] - est.mean[a];
                    const double y = rows[r][b] - est.mean[b];
                    const double Sr = S - x * y - x * y / (dn - 1.0);
                    loo[r] = Sr / (dn - 2.0);
                    loo_mean += loo[r];
                }
                loo_mean /= dn;
                double ss = 0.0;
                for (double v : loo) {
                    ss += (v - loo_mean) * (v - loo_mean);
                }
                se = std::sqrt((dn - 1.0) / dn * ss);
            }
            est.covariance[a * d + b] = est.covariance[b * d + a] = full;
            est.standard_error[a * d + b] = est.standard_error[b * d + a] = se;
        }
    }
    return est;
}

CovarianceEstimate covariance_matrix(const std::vector<FluctuationSample>& samples, double t) {
    if (samples.size() < 2) {
        throw ParameterError("covariance needs at least 2 samples");
    }
    const auto& grid = samples.front().grid;
    const std::size_t n = samples.front().K.size();
    for (const auto& s : samples) {
        if (!(s.grid == grid) || s.K.size() != n) {
            throw ContractError("fluctuation samples live on different grids or track different vertex counts");
        }
    }
    const std::size_t m = grid.nearest(t);
    std::vector<std::vector<double>> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) {
        std::vector<double> row{s.Kbar[m]};
        for (const auto& path : s.K) {
            row.push_back(path[m]);
        }
        rows.push_back(std::move(row));
    }
    return covariance_of_rows(rows);
}

} // namespace hawkes_mf
