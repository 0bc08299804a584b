#pragma once

#include "hawkes_mf/analysis.hpp"
#include "hawkes_mf/kernels.hpp"
#include "hawkes_mf/simulator.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hawkes_mf {

inline constexpr int kSchemaVersion = 1;

enum class NetworkKind { erdos_renyi, complementary };

struct ModelConfig {
    std::vector<std::size_t> sizes{500};
    double p{0.5};
    double q{0.5};
    nlohmann::json kernel_spec{{"exponential", {{"lambda", 1.0}}}};
    nlohmann::json transfer_spec{{"arctan", nlohmann::json::object()}};
    Scaling scaling{Scaling::critical};
    NetworkKind network{NetworkKind::erdos_renyi};
    /// Fixed network seed; otherwise derived per replicate from the master seed.
    std::optional<std::uint64_t> network_seed;
};

struct RunConfig {
    double horizon{10.0};
    /// 0 selects horizon / 2048.
    double step{0.0};
    std::size_t replicates{20};
    std::vector<std::size_t> tracked{0, 1};
    std::uint64_t master_seed{1};
    /// Explicit per-replicate process seeds for `simulate`; derived when empty.
    std::vector<std::uint64_t> seeds;
    Backend backend{Backend::thinning};
    std::size_t limit_samples{10000};
    std::size_t samples{1000};
    std::size_t paths{1000};
    bool complementary{true};
    std::uint64_t complementary_seed{7};
};

struct OutputConfig {
    std::string dir;
    /// "jsonl" or "csv".
    std::string events_format{"jsonl"};
    /// fluctuations: number of per-sample path files written.
    std::size_t path_files{8};
};

struct ExperimentConfig {
    ModelConfig model;
    RunConfig run;
    std::string experiment;
    OutputConfig output;
    Tolerances tolerances;

    [[nodiscard]] double resolved_step() const { return run.step > 0.0 ? run.step : run.horizon / 2048.0; }
};

[[nodiscard]] Kernel kernel_from_json(const nlohmann::json& spec, const std::string& path = "model.kernel");
[[nodiscard]] TransferFunction transfer_from_json(const nlohmann::json& spec, const std::string& path = "model.transfer");

/// Validates and resolves a config document; unknown keys and type errors
/// throw ConfigError carrying the dotted field path. A run manifest is
/// accepted too, in which case its embedded resolved config is used.
[[nodiscard]] ExperimentConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& file);

/// Fully resolved form; parse_config(resolved_json(c)) reproduces c.
[[nodiscard]] nlohmann::json resolved_json(const ExperimentConfig& config);

/// p = 1/2 exactly when the scaling (and the critical experiment) is selected.
void check_regime(const ExperimentConfig& config, const std::string& experiment);

[[nodiscard]] ExperimentSettings to_settings(const ExperimentConfig& config, std::size_t jobs);

} // namespace hawkes_mf
