#include "hawkes_mf/config.hpp"
#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace hawkes_mf;
using nlohmann::json;

namespace {

std::string error_path(const json& doc) {
    try {
        (void)parse_config(doc);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "";
}

} // namespace

TEST_CASE("defaults and regime-dependent horizon") {
    const auto c = parse_config(json::object());
    CHECK(c.model.p == 0.5);
    CHECK(c.model.scaling == Scaling::critical);
    CHECK(c.run.horizon == 10.0);
    CHECK(c.resolved_step() == 10.0 / 2048);
    const auto off = parse_config(json{{"model", {{"p", 0.8}}}});
    CHECK(off.model.scaling == Scaling::mean_field);
    CHECK(off.run.horizon == 5.0);
}

TEST_CASE("strict validation names the offending field") {
    CHECK(error_path(json{{"model", {{"pp", 0.8}}}}) == "model.pp");
    CHECK(error_path(json{{"bogus", 1}}) == "bogus");
    CHECK(error_path(json{{"model", {{"p", "high"}}}}) == "model.p");
    CHECK(error_path(json{{"model", {{"q", 1.5}}}}) == "model.q");
    CHECK(error_path(json{{"model", {{"p", 0.8}, {"scaling", "critical"}}}}) == "model.scaling");
    CHECK(error_path(json{{"model", {{"kernel", {{"gaussian", json::object()}}}}}}) == "model.kernel.gaussian");
    CHECK(error_path(json{{"run", {{"tracked", {0, 900}}}}}) == "run.tracked");
    CHECK(error_path(json{{"experiment", "nope"}}) == "experiment");
    CHECK(error_path(json{{"output", {{"events_format", "xml"}}}}) == "output.events_format");
}

TEST_CASE("resolved config round-trips and manifests are accepted") {
    const json doc{{"experiment", "clt"},
                   {"model", {{"sizes", {50, 100}}, {"p", 0.7}, {"q", 0.3}, {"transfer", {{"constant", {{"value", 2.0}}}}}}},
                   {"run", {{"horizon", 2.0}, {"replicates", 30}, {"master_seed", 5}, {"backend", "timechange"}}},
                   {"tolerances", {{"mean_se", 2.5}}}};
    const auto c = parse_config(doc);
    const auto again = parse_config(resolved_json(c));
    CHECK(resolved_json(again) == resolved_json(c));
    CHECK(again.run.backend == Backend::time_change);
    CHECK(again.tolerances.mean_se == 2.5);
    const json manifest{{"schema_version", kSchemaVersion}, {"command", "verify"}, {"config", resolved_json(c)}};
    CHECK(resolved_json(parse_config(manifest)) == resolved_json(c));

    const auto s = to_settings(c, 3);
    CHECK(s.sizes == std::vector<std::size_t>{50, 100});
    CHECK(s.jobs == 3);
    CHECK(s.transfer(0.0) == 2.0);
}

TEST_CASE("regime checks") {
    auto c = parse_config(json{{"model", {{"p", 0.8}}}});
    CHECK_THROWS_AS(check_regime(c, "critical"), ConfigError);
    CHECK_NOTHROW(check_regime(c, "lln"));
    c = parse_config(json::object());
    CHECK_THROWS_AS(check_regime(c, "clt"), ConfigError);
    CHECK_NOTHROW(check_regime(c, "critical"));
}

TEST_CASE("kernel and transfer specs") {
    CHECK(kernel_from_json(json{{"exponential", {{"lambda", 2.0}}}}).rate() == 2.0);
    const auto tab = kernel_from_json(json{{"tabulated", {{"step", 0.5}, {"values", {1.0, 0.5}}, {"derivatives", {0.0, 0.0}}}}});
    CHECK(tab(0.25) == doctest::Approx(0.75));
    CHECK(transfer_from_json(json{{"rectified_linear", {{"base", 1.0}, {"slope", 2.0}}}})(1.0) == 3.0);
    CHECK_THROWS_AS((void)kernel_from_json(json{{"exponential", {{"lambda", -1.0}}}}), ConfigError);
}

TEST_CASE("comments are allowed in config files") {
    const auto dir = std::filesystem::temp_directory_path() / "hawkes_mf_config_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "c.json");
        f << "{\n  // balanced\n  \"model\": {\"p\": 0.5}\n}\n";
    }
    CHECK(load_config(dir / "c.json").model.p == 0.5);
    CHECK_THROWS_AS((void)load_config(dir / "missing.json"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("number formatting round-trips") {
    for (double x : {0.1, 1.0 / 3, 1e-300, -2.5, 123456789.0}) {
        CHECK(std::stod(io::format_double(x)) == x);
    }
    CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
}

TEST_CASE("CSV writers") {
    io::CsvBuilder csv("demo/1", {"a", "b"});
    csv.row(std::vector<double>{1.0, 0.5});
    CHECK(csv.str() == "# schema: demo/1\na,b\n1,0.5\n");
    CHECK_THROWS_AS(csv.row(std::vector<double>{1.0}), ContractError);

    SpikeTrains trains;
    trains.times = {{0.5, 2.0}, {1.0}};
    const auto events = io::events_csv(trains);
    CHECK(events.find("0.5,0\n1,1\n2,0\n") != std::string::npos);
    CHECK(io::events_jsonl(trains) == "{\"t\":0.5,\"vertex\":0}\n{\"t\":1,\"vertex\":1}\n{\"t\":2,\"vertex\":0}\n");

    Table t{"x", {"v"}, {{1.5}}, {"row0"}};
    CHECK(io::table_csv(t).find("row,v\nrow0,1.5\n") != std::string::npos);

    ExperimentReport empty;
    const auto plot = io::plot_data_csv(empty);
    std::istringstream lines(plot);
    std::string first, second, third;
    std::getline(lines, first);
    std::getline(lines, second);
    CHECK(first.rfind("# schema:", 0) == 0);
    CHECK(second == "series,t,value,replicate");
    CHECK_FALSE(std::getline(lines, third));

    ExperimentReport one;
    one.series.push_back({"s", -1, {0.0, 1.0}, {2.0, 3.0}});
    one.series.push_back({"s", 4, {0.0}, {1.0}});
    const auto text = io::plot_data_csv(one);
    CHECK(text.find("s,1,3,NA\n") != std::string::npos);
    CHECK(text.find("s,0,1,4\n") != std::string::npos);
}

TEST_CASE("atomic writes replace the target and leave no temporary behind") {
    const auto dir = std::filesystem::temp_directory_path() / "hawkes_mf_io_test";
    std::filesystem::remove_all(dir);
    io::write_atomic(dir / "sub" / "f.txt", "one");
    io::write_atomic(dir / "sub" / "f.txt", "two");
    std::ifstream in(dir / "sub" / "f.txt");
    std::string s;
    std::getline(in, s);
    CHECK(s == "two");
    CHECK(std::distance(std::filesystem::directory_iterator(dir / "sub"), std::filesystem::directory_iterator{}) == 1);
    std::filesystem::remove_all(dir);
}
