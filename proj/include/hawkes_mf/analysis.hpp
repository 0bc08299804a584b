#pragma once

#include "hawkes_mf/kernels.hpp"
#include "hawkes_mf/network.hpp"
#include "hawkes_mf/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hawkes_mf {

/// Numeric table; every statistic column sits next to its replicate count and
/// standard error so verdicts can be recomputed from the table alone.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    /// Optional names of the rows (same length as rows when present).
    std::vector<std::string> row_labels;

    [[nodiscard]] std::size_t column(const std::string& label) const;
    [[nodiscard]] double at(std::size_t row, const std::string& label) const { return rows.at(row).at(column(label)); }
    /// Index of the row with this label; throws ContractError when missing.
    [[nodiscard]] std::size_t row(const std::string& label) const;
    [[nodiscard]] double at(const std::string& row_label, const std::string& label) const {
        return at(row(row_label), label);
    }
};

struct Verdict {
    std::string name;
    bool passed{false};
    std::string rule;
    double statistic{0.0};
    double threshold{0.0};
    /// Informational verdicts are reported but do not fail the experiment.
    bool gating{true};
};

/// Plot series in long form; replicate < 0 marks an aggregate over replicates.
struct Series {
    std::string name;
    long replicate{-1};
    std::vector<double> t;
    std::vector<double> value;
};

struct SeedRecord {
    std::string label;
    std::size_t n{0};
    std::size_t replicate{0};
    std::uint64_t network_seed{0};
    std::uint64_t process_seed{0};
};

struct ExperimentReport {
    std::string experiment;
    nlohmann::json parameters;
    std::vector<Table> tables;
    std::vector<Verdict> verdicts;
    std::vector<Series> series;
    std::vector<SeedRecord> seeds;

    [[nodiscard]] const Table& table(const std::string& name) const;
    [[nodiscard]] bool passed() const noexcept;
};

struct Tolerances {
    double mean_se{3.0};
    double covariance_pooled_se{4.0};
    double critical_slope_relative{0.10};
    double lln_ratio_low{2.0};
    double lln_ratio_high{8.0};
    double alpha{0.01};
    std::size_t min_replicates{20};
    /// Relative rms gap allowed between sqrt(N)(h(I^N) - h(I)) and h'(I) K^N.
    double linearization_relative{0.10};
};

[[nodiscard]] nlohmann::json to_json(const Tolerances& tol);

struct ExperimentSettings {
    double p{0.8};
    double q{0.5};
    Kernel kernel{Kernel::exponential(1.0)};
    TransferFunction transfer{TransferFunction::arctan()};
    double horizon{5.0};
    /// 0 selects horizon / 2048.
    double step{0.0};
    std::size_t replicates{50};
    std::uint64_t master_seed{1};
    std::size_t jobs{1};
    Backend backend{Backend::thinning};
    /// Network sizes; single-size experiments use the last entry.
    std::vector<std::size_t> sizes{100, 400, 1600};
    /// Tracked vertices (clt, critical) or vertex count m (independence).
    std::size_t tracked{2};
    std::size_t limit_samples{10000};
    /// critical: also run the complementary-network configuration.
    bool complementary{true};
    /// critical: use this network for the complementary part instead of building one.
    std::optional<NetworkConfiguration> network_override;
    /// critical: seed of the complementary network when it is built here.
    std::uint64_t complementary_seed{7};
    /// convolution_bound: number of random jump paths.
    std::size_t paths{1000};

    [[nodiscard]] double resolved_step() const { return step > 0.0 ? step : horizon / 2048.0; }
    [[nodiscard]] std::size_t largest_size() const;
};

[[nodiscard]] nlohmann::json to_json(const ExperimentSettings& settings);

/// Verdicts as a pure function of the report tables and tolerances.
[[nodiscard]] std::vector<Verdict> judge(const ExperimentReport& report, const Tolerances& tol);

/// sup_i sup_grid |I^{N,i} - I| against the mean-field solution, per N.
[[nodiscard]] ExperimentReport lln_experiment(const ExperimentSettings& s, const Tolerances& tol = {});
/// sqrt(N)(I^{N,k}_T - I_T) against Monte Carlo of the fluctuation limit.
[[nodiscard]] ExperimentReport clt_experiment(const ExperimentSettings& s, const Tolerances& tol = {});
/// Averaged compensated counts: LLN, CLT and the centred total count.
[[nodiscard]] ExperimentReport corollary_experiment(const ExperimentSettings& s, const Tolerances& tol = {});
/// p = 1/2 with 1/sqrt(N) scaling: covariation approximants, drift and martingale parts.
[[nodiscard]] ExperimentReport critical_experiment(const ExperimentSettings& s, const Tolerances& tol = {});
/// Pairwise count correlations and the Poisson marginal of a few vertices.
[[nodiscard]] ExperimentReport independence_experiment(const ExperimentSettings& s, const Tolerances& tol = {});
/// Thinning against the time-change backend on identical networks.
[[nodiscard]] ExperimentReport backend_experiment(const ExperimentSettings& s, const Tolerances& tol = {});
/// Moments of W^N and of the per-target W^{N,i} over freshly sampled networks.
[[nodiscard]] ExperimentReport weights_experiment(const ExperimentSettings& s, const Tolerances& tol = {});
/// sup (int phi dJ)^2 against C sup J^2 on random jump paths, for C = ||phi|| + t||phi'||
/// and for its square.
[[nodiscard]] ExperimentReport convolution_bound_experiment(const ExperimentSettings& s, const Tolerances& tol = {});

[[nodiscard]] std::vector<std::string> experiment_names();
[[nodiscard]] ExperimentReport run_experiment(const std::string& name, const ExperimentSettings& s,
                                              const Tolerances& tol = {});

[[nodiscard]] nlohmann::json report_to_json(const ExperimentReport& report);
[[nodiscard]] ExperimentReport report_from_json(const nlohmann::json& j);

} // namespace hawkes_mf
