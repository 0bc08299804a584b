#include "hawkes_mf/analysis.hpp"
#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/parallel.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

using namespace hawkes_mf;

namespace {

ExperimentSettings small(double p, double q, std::vector<std::size_t> sizes, std::size_t replicates,
                         double horizon) {
    ExperimentSettings s;
    s.p = p;
    s.q = q;
    s.sizes = std::move(sizes);
    s.replicates = replicates;
    s.horizon = horizon;
    s.step = horizon / 256;
    s.jobs = default_jobs();
    s.limit_samples = 500;
    s.paths = 100;
    s.tracked = 2;
    return s;
}

const Verdict& verdict(const ExperimentReport& r, const std::string& name) {
    const auto it = std::find_if(r.verdicts.begin(), r.verdicts.end(), [&](const Verdict& v) { return v.name == name; });
    REQUIRE(it != r.verdicts.end());
    return *it;
}

} // namespace

TEST_CASE("lln without edges has zero error") {
    const auto r = run_experiment("lln", small(0.8, 0.0, {20, 40}, 20, 1.0));
    const auto& t = r.table("errors");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.at(i, "median") == 0.0);
        CHECK(t.at(i, "mean") == 0.0);
    }
}

TEST_CASE("lln with constant h on the complete graph: error falls with N") {
    auto s = small(1.0, 1.0, {100, 400}, 20, 2.0);
    s.transfer = TransferFunction::constant(1.0);
    const auto r = run_experiment("lln", s);
    const auto& t = r.table("errors");
    CHECK(t.at(1, "median") < t.at(0, "median"));
    CHECK(verdict(r, "median_strictly_decreasing").passed);
}

TEST_CASE("verdicts are a pure function of the persisted report") {
    auto s = small(0.5, 0.5, {60}, 20, 2.0);
    const auto r = run_experiment("critical", s);
    const auto back = report_from_json(report_to_json(r));
    const auto again = judge(back, Tolerances{});
    REQUIRE(again.size() == r.verdicts.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].name == r.verdicts[i].name);
        CHECK(again[i].passed == r.verdicts[i].passed);
        CHECK((again[i].statistic == r.verdicts[i].statistic ||
               (std::isnan(again[i].statistic) && std::isnan(r.verdicts[i].statistic))));
    }
    CHECK(report_to_json(back) == report_to_json(r));

    std::set<std::string> names;
    for (const auto& series : r.series) {
        names.insert(series.name);
    }
    for (const char* want : {"cov00_realized_mean", "cov00_predictable_mean", "cov00_mean_rate_mean",
                             "cov00_limit_mean", "drift_vertex0_mean", "drift_vertex1_mean",
                             "martingale_vertex0_mean", "martingale_vertex1_mean"}) {
        CHECK(names.count(want) == 1);
    }
}

TEST_CASE("stricter tolerances can only remove passes") {
    const auto r = run_experiment("weights", small(0.7, 0.4, {200}, 200, 1.0));
    CHECK(r.passed());
    Tolerances strict;
    strict.mean_se = 0.0;
    strict.min_replicates = 1000;
    const auto v = judge(r, strict);
    CHECK(std::none_of(v.begin(), v.end(), [](const Verdict& x) { return x.name == "replicate_count" && x.passed; }));
}

TEST_CASE("corollary with constant h: compensated total has variance cT") {
    auto s = small(0.8, 0.5, {50, 200}, 200, 2.0);
    s.transfer = TransferFunction::constant(1.0);
    const auto r = run_experiment("corollary", s);
    CHECK(r.table("total_count").at("compensated_total", "target_variance") == doctest::Approx(2.0));
    CHECK(verdict(r, "compensated_total_variance").passed);
    CHECK(verdict(r, "compensated_total_mean").passed);
}

TEST_CASE("independence without edges") {
    auto s = small(0.8, 0.0, {50}, 100, 2.0);
    s.tracked = 4;
    const auto r = run_experiment("independence", s);
    CHECK(verdict(r, "pairwise_correlation_zero").passed);
    CHECK(verdict(r, "marginal_mean").passed);
}

TEST_CASE("convolution bound holds on random paths") {
    const auto r = run_experiment("convolution_bound", small(0.8, 0.5, {100}, 20, 5.0));
    const auto& t = r.table("violations");
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        CHECK(t.at(i, "violations") == 0.0);
    }
}

TEST_CASE("experiment dispatch and regime checks") {
    CHECK(experiment_names().size() == 8);
    CHECK_THROWS_AS((void)run_experiment("nope", small(0.8, 0.5, {10}, 20, 1.0)), ParameterError);
    CHECK_THROWS_AS((void)run_experiment("clt", small(0.5, 0.5, {10}, 20, 1.0)), RegimeError);
    CHECK_THROWS_AS((void)run_experiment("critical", small(0.8, 0.5, {10}, 20, 1.0)), RegimeError);
}

TEST_CASE("report JSON survives non-finite numbers") {
    ExperimentReport r;
    r.experiment = "x";
    r.tables.push_back({"t", {"a", "b"}, {{1.0, std::numeric_limits<double>::quiet_NaN()}, {
                                              std::numeric_limits<double>::infinity(), -2.5}}, {"r0", "r1"}});
    const auto back = report_from_json(nlohmann::json::parse(report_to_json(r).dump()));
    CHECK(std::isnan(back.table("t").at("r0", "b")));
    CHECK(back.table("t").at(1, "a") == std::numeric_limits<double>::infinity());
    CHECK(back.table("t").at("r1", "b") == -2.5);
    CHECK_THROWS_AS((void)back.table("missing"), ContractError);
}
