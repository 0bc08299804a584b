#include "hawkes_mf/io.hpp"

#include "hawkes_mf/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <system_error>
#include <tuple>
#include <unistd.h>

namespace hawkes_mf::io {

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buffer[32];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) {
        throw ContractError("cannot format floating-point value");
    }
    return {buffer, end};
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

std::string quote(const std::string& cell) {
    if (cell.find_first_of(",\"\n") == std::string::npos) {
        return cell;
    }
    std::string out = "\"";
    for (char c : cell) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

} // namespace

CsvBuilder::CsvBuilder(const std::string& schema, const std::vector<std::string>& columns)
    : width_(columns.size()) {
    text_ = "# schema: " + schema + "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) {
        text_ += (i ? "," : "") + quote(columns[i]);
    }
    text_ += '\n';
}

CsvBuilder& CsvBuilder::row(const std::vector<double>& values) {
    if (values.size() != width_) {
        throw ContractError("CSV row width does not match the header");
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
        text_ += (i ? "," : "") + format_double(values[i]);
    }
    text_ += '\n';
    return *this;
}

CsvBuilder& CsvBuilder::row(const std::vector<std::string>& cells) {
    if (cells.size() != width_) {
        throw ContractError("CSV row width does not match the header");
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        text_ += (i ? "," : "") + quote(cells[i]);
    }
    text_ += '\n';
    return *this;
}

namespace {

std::vector<std::pair<double, std::size_t>> merged(const SpikeTrains& trains) {
    std::vector<std::pair<double, std::size_t>> events;
    events.reserve(trains.total_events());
    for (std::size_t v = 0; v < trains.times.size(); ++v) {
        for (double t : trains.times[v]) {
            events.emplace_back(t, v);
        }
    }
    std::sort(events.begin(), events.end());
    return events;
}

} // namespace

std::string events_jsonl(const SpikeTrains& trains) {
    std::string out;
    for (const auto& [t, v] : merged(trains)) {
        out += "{\"t\":" + format_double(t) + ",\"vertex\":" + std::to_string(v) + "}\n";
    }
    return out;
}

std::string events_csv(const SpikeTrains& trains) {
    CsvBuilder csv("hawkes_mf.events/1", {"t", "vertex"});
    for (const auto& [t, v] : merged(trains)) {
        csv.row(std::vector<std::string>{format_double(t), std::to_string(v)});
    }
    return csv.str();
}

std::string table_csv(const Table& table) {
    std::vector<std::string> columns;
    const bool labelled = !table.row_labels.empty();
    if (labelled) {
        columns.push_back("row");
    }
    columns.insert(columns.end(), table.columns.begin(), table.columns.end());
    CsvBuilder csv("hawkes_mf.table." + table.name + "/1", columns);
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        std::vector<std::string> cells;
        if (labelled) {
            cells.push_back(table.row_labels.at(r));
        }
        for (double v : table.rows[r]) {
            cells.push_back(format_double(v));
        }
        csv.row(cells);
    }
    return csv.str();
}

std::string plot_data_csv(const ExperimentReport& report) {
    CsvBuilder csv("hawkes_mf.plot/1", {"series", "t", "value", "replicate"});
    for (const auto& s : report.series) {
        const std::string rep = s.replicate < 0 ? "NA" : std::to_string(s.replicate);
        for (std::size_t m = 0; m < s.t.size(); ++m) {
            csv.row(std::vector<std::string>{s.name, format_double(s.t[m]), format_double(s.value[m]), rep});
        }
    }
    return csv.str();
}

} // namespace hawkes_mf::io
