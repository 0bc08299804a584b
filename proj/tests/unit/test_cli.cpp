#include "cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using hawkes_mf::cli::run;

namespace {

struct Scratch {
    fs::path dir;
    explicit Scratch(const std::string& name) : dir(fs::temp_directory_path() / ("hawkes_mf_cli_" + name)) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Scratch() { fs::remove_all(dir); }
    fs::path write(const std::string& file, const std::string& text) const {
        std::ofstream(dir / file) << text;
        return dir / file;
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_CASE("meanfield at balanced signs writes zeros") {
    Scratch s("meanfield");
    const auto cfg = s.write("c.json", R"({"model": {"p": 0.5, "q": 0.5}, "run": {"horizon": 2.0, "step": 0.125}})");
    REQUIRE(run({"meanfield", "--config", cfg.string(), "--out", (s.dir / "out").string()}) == 0);
    std::istringstream lines(slurp(s.dir / "out" / "I.csv"));
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("# schema:", 0) == 0);
    std::getline(lines, line);
    CHECK(line == "t,I");
    int rows = 0;
    while (std::getline(lines, line)) {
        CHECK(line.substr(line.find(',') + 1) == "0");
        ++rows;
    }
    CHECK(rows == 17);
    CHECK(fs::exists(s.dir / "out" / "manifest.json"));

    REQUIRE(run({"meanfield", "--config", cfg.string(), "--out", (s.dir / "I2.csv").string(), "--scheme", "ode_rk4"}) ==
            0);
    CHECK(fs::exists(s.dir / "I2.manifest.json"));
}

TEST_CASE("simulate is deterministic for a fixed master seed") {
    Scratch s("simulate");
    const auto cfg = s.write("c.json", R"({"model": {"n": 30, "p": 0.8, "q": 0.5},
        "run": {"horizon": 2.0, "replicates": 2, "tracked": [0, 1], "master_seed": 4}})");
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (s.dir / "a").string(), "--jobs", "2"}) == 0);
    REQUIRE(run({"simulate", "--config", cfg.string(), "--out", (s.dir / "b").string(), "--jobs", "1"}) == 0);
    for (const char* f : {"replicate_0000_events.jsonl", "replicate_0001_events.jsonl",
                          "replicate_0001_intensity.csv", "manifest.json"}) {
        if (std::string(f) == "manifest.json") {
            continue; // records the output directory
        }
        CHECK(slurp(s.dir / "a" / f) == slurp(s.dir / "b" / f));
        CHECK_FALSE(slurp(s.dir / "a" / f).empty());
    }
    CHECK(slurp(s.dir / "a" / "replicate_0000_events.jsonl") != slurp(s.dir / "a" / "replicate_0001_events.jsonl"));

    // Rerunning from the manifest reproduces the events.
    REQUIRE(run({"simulate", "--config", (s.dir / "a" / "manifest.json").string(), "--out", (s.dir / "c").string()}) ==
            0);
    CHECK(slurp(s.dir / "a" / "replicate_0001_events.jsonl") == slurp(s.dir / "c" / "replicate_0001_events.jsonl"));
}

TEST_CASE("configuration errors exit with code 2") {
    Scratch s("errors");
    const auto typo = s.write("typo.json", R"({"model": {"p": 0.8, "qq": 0.5}})");
    CHECK(run({"simulate", "--config", typo.string(), "--out", (s.dir / "o").string()}) == 2);
    const auto crit = s.write("crit.json", R"({"model": {"p": 0.8}})");
    CHECK(run({"verify", "--config", crit.string(), "--experiment", "critical", "--out", (s.dir / "o").string()}) ==
          2);
    CHECK(run({"verify", "--config", crit.string(), "--experiment", "bogus", "--out", (s.dir / "o").string()}) == 2);
    CHECK(run({"meanfield", "--config", (s.dir / "absent.json").string()}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({"simulate", "--config", crit.string(), "--backend", "magic", "--out", (s.dir / "o").string()}) == 2);
}

TEST_CASE("verify, rerun from manifest and plot-data") {
    Scratch s("verify");
    const auto cfg = s.write("c.json", R"({"experiment": "weights",
        "model": {"sizes": [100], "p": 0.7, "q": 0.4}, "run": {"replicates": 50, "master_seed": 2}})");
    REQUIRE(run({"verify", "--config", cfg.string(), "--out", (s.dir / "a").string()}) == 0);
    REQUIRE(run({"verify", "--config", (s.dir / "a" / "manifest.json").string(), "--out", (s.dir / "b").string(),
                 "--jobs", "3"}) == 0);
    for (const auto& entry : fs::directory_iterator(s.dir / "a" / "tables")) {
        CHECK(slurp(entry.path()) == slurp(s.dir / "b" / "tables" / entry.path().filename()));
    }
    REQUIRE(run({"plot-data", "--report", (s.dir / "a" / "report.json").string(), "--out",
                 (s.dir / "plot.csv").string()}) == 0);
    const auto text = slurp(s.dir / "plot.csv");
    CHECK(text.find("series,t,value,replicate\n") != std::string::npos);
    CHECK(run({"plot-data", "--report", (s.dir / "nope.json").string(), "--out", (s.dir / "p.csv").string()}) == 2);
}

TEST_CASE("fluctuations writes terminal values, covariance and capped path files") {
    Scratch s("fluct");
    const auto cfg = s.write("c.json", R"({"model": {"p": 0.8, "q": 0.5}, "run": {"horizon": 1.0, "step": 0.0625,
        "tracked": [0, 1], "samples": 20}, "output": {"path_files": 3}})");
    REQUIRE(run({"fluctuations", "--config", cfg.string(), "--out", (s.dir / "f").string()}) == 0);
    CHECK(fs::exists(s.dir / "f" / "terminal.csv"));
    CHECK(fs::exists(s.dir / "f" / "covariance.json"));
    CHECK(std::distance(fs::directory_iterator(s.dir / "f" / "paths"), fs::directory_iterator{}) == 3);
}
