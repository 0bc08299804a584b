#pragma once

#include "hawkes_mf/analysis.hpp"
#include "hawkes_mf/simulator.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hawkes_mf::io {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
[[nodiscard]] std::string format_double(double value);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// CSV text with a leading "# schema: <name>/<version>" comment line.
class CsvBuilder {
public:
    CsvBuilder(const std::string& schema, const std::vector<std::string>& columns);

    CsvBuilder& row(const std::vector<double>& values);
    CsvBuilder& row(const std::vector<std::string>& cells);
    [[nodiscard]] const std::string& str() const noexcept { return text_; }

private:
    std::size_t width_;
    std::string text_;
};

/// One JSON object {"t": ..., "vertex": ...} per line, ordered by time.
[[nodiscard]] std::string events_jsonl(const SpikeTrains& trains);
/// Columns t, vertex, ordered by time.
[[nodiscard]] std::string events_csv(const SpikeTrains& trains);

[[nodiscard]] std::string table_csv(const Table& table);

/// Long-format plot data: series, t, value, replicate ("NA" for aggregates).
[[nodiscard]] std::string plot_data_csv(const ExperimentReport& report);

} // namespace hawkes_mf::io
