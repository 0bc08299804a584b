#include "hawkes_mf/analysis.hpp"

#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/fluctuations.hpp"
#include "hawkes_mf/parallel.hpp"
#include "hawkes_mf/random.hpp"
#include "hawkes_mf/stats.hpp"
#include "hawkes_mf/volterra.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hawkes_mf {

using nlohmann::json;

std::size_t Table::column(const std::string& label) const {
    const auto it = std::find(columns.begin(), columns.end(), label);
    if (it == columns.end()) {
        throw ContractError("table '" + name + "' has no column '" + label + "'");
    }
    return static_cast<std::size_t>(it - columns.begin());
}

std::size_t Table::row(const std::string& label) const {
    const auto it = std::find(row_labels.begin(), row_labels.end(), label);
    if (it == row_labels.end()) {
        throw ContractError("table '" + name + "' has no row '" + label + "'");
    }
    return static_cast<std::size_t>(it - row_labels.begin());
}

const Table& ExperimentReport::table(const std::string& name) const {
    for (const auto& t : tables) {
        if (t.name == name) {
            return t;
        }
    }
    throw ContractError("report '" + experiment + "' has no table '" + name + "'");
}

bool ExperimentReport::passed() const noexcept {
    return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed || !v.gating; });
}

std::size_t ExperimentSettings::largest_size() const {
    if (sizes.empty()) {
        throw ParameterError("experiment needs at least one network size");
    }
    return sizes.back();
}

json to_json(const Tolerances& tol) {
    return {{"mean_se", tol.mean_se},
            {"covariance_pooled_se", tol.covariance_pooled_se},
            {"critical_slope_relative", tol.critical_slope_relative},
            {"lln_ratio_low", tol.lln_ratio_low},
            {"lln_ratio_high", tol.lln_ratio_high},
            {"alpha", tol.alpha},
            {"min_replicates", tol.min_replicates},
            {"linearization_relative", tol.linearization_relative}};
}

json to_json(const ExperimentSettings& s) {
    json j{{"p", s.p},
           {"q", s.q},
           {"kernel", s.kernel.id()},
           {"transfer", s.transfer.id()},
           {"horizon", s.horizon},
           {"step", s.resolved_step()},
           {"replicates", s.replicates},
           {"master_seed", s.master_seed},
           {"backend", to_string(s.backend)},
           {"sizes", s.sizes},
           {"tracked", s.tracked},
           {"limit_samples", s.limit_samples},
           {"complementary", s.complementary},
           {"complementary_seed", s.complementary_seed},
           {"paths", s.paths}};
    if (s.network_override) {
        j["network_override"] = network_to_json(*s.network_override, false);
    }
    return j;
}

namespace {

enum class Tag : std::uint32_t {
    lln = 1,
    clt = 2,
    corollary = 3,
    critical = 4,
    independence = 5,
    backend = 6,
    weights = 7,
    convolution = 8,
};

std::uint32_t tag_for(Tag tag, std::size_t size_index) {
    return static_cast<std::uint32_t>(tag) * 256u + static_cast<std::uint32_t>(size_index);
}

struct ReplicateSeeds {
    std::uint64_t network;
    std::uint64_t process;
};

ReplicateSeeds replicate_seeds(std::uint64_t master, Tag tag, std::size_t size_index, std::size_t r) {
    const auto t = tag_for(tag, size_index);
    return {derive_seed(master, t, 2 * r), derive_seed(master, t, 2 * r + 1)};
}

void record_seeds(ExperimentReport& report, const std::string& label, std::size_t n, Tag tag, std::size_t size_index,
                  std::size_t replicates, std::uint64_t master) {
    for (std::size_t r = 0; r < replicates; ++r) {
        const auto seeds = replicate_seeds(master, tag, size_index, r);
        report.seeds.push_back({label, n, r, seeds.network, seeds.process});
    }
}

void require_off_critical(const ExperimentSettings& s, const std::string& name) {
    if (s.p == 0.5) {
        throw RegimeError(name + " experiment needs p != 1/2; use the critical experiment for balanced networks");
    }
}

void require_replicates(const ExperimentSettings& s) {
    if (s.replicates < 2) {
        throw ParameterError("experiment needs at least 2 replicates");
    }
}

IntensityPath mean_field(const ExperimentSettings& s) {
    return solve_mean_field(s.kernel, s.transfer, s.p, s.q, s.horizon, s.resolved_step(),
                            MeanFieldScheme::volterra_trapezoid);
}

SimulationConfig sim_config(const ExperimentSettings& s, Scaling scaling, std::uint64_t seed, bool full,
                            std::vector<std::size_t> tracked = {}) {
    SimulationConfig c;
    c.horizon = s.horizon;
    c.scaling = scaling;
    c.record_step = s.resolved_step();
    c.tracked = std::move(tracked);
    c.seed = seed;
    c.record_full = full;
    return c;
}

std::size_t series_stride(const TimeGrid& grid) { return std::max<std::size_t>(1, (grid.points() + 511) / 512); }

Series thinned(const std::string& name, long replicate, const TimeGrid& grid, const std::vector<double>& values) {
    Series out{name, replicate, {}, {}};
    const std::size_t stride = series_stride(grid);
    for (std::size_t m = 0; m < values.size(); m += stride) {
        out.t.push_back(grid.time(m));
        out.value.push_back(values[m]);
    }
    if ((values.size() - 1) % stride != 0) {
        out.t.push_back(grid.time(values.size() - 1));
        out.value.push_back(values.back());
    }
    return out;
}

// Pointwise replicate mean and standard error of equally long paths.
std::pair<std::vector<double>, std::vector<double>> band(const std::vector<std::vector<double>>& paths) {
    const std::size_t points = paths.front().size();
    std::vector<double> mean(points), se(points);
    std::vector<double> column(paths.size());
    for (std::size_t m = 0; m < points; ++m) {
        for (std::size_t r = 0; r < paths.size(); ++r) {
            column[r] = paths[r][m];
        }
        const auto s = stats::summarize(column);
        mean[m] = s.mean;
        se[m] = s.se;
    }
    return {mean, se};
}

void add_band(ExperimentReport& report, const std::string& name, const TimeGrid& grid,
              const std::vector<std::vector<double>>& paths, std::size_t keep_replicates) {
    if (paths.empty()) {
        return;
    }
    for (std::size_t r = 0; r < std::min(keep_replicates, paths.size()); ++r) {
        report.series.push_back(thinned(name, static_cast<long>(r), grid, paths[r]));
    }
    if (paths.size() >= 2) {
        auto [mean, se] = band(paths);
        report.series.push_back(thinned(name + "_mean", -1, grid, mean));
        report.series.push_back(thinned(name + "_se", -1, grid, se));
    }
}

Verdict within(const std::string& name, double difference, double se, double factor, const std::string& rule,
               bool gating = true) {
    const double z = se > 0.0 ? std::abs(difference) / se : (difference == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    return {name, z <= factor, rule, z, factor, gating};
}

Verdict replicate_verdict(double count, const Tolerances& tol) {
    return {"replicate_count", count >= static_cast<double>(tol.min_replicates),
            "every statistic uses at least min_replicates replicates", count,
            static_cast<double>(tol.min_replicates), true};
}

// --- lln ---------------------------------------------------------------------

ExperimentReport lln_impl(const ExperimentSettings& s, const Tolerances&) {
    require_off_critical(s, "lln");
    require_replicates(s);
    ExperimentReport report;
    report.experiment = "lln";
    const auto I = mean_field(s);
    Table per{"replicates", {"n", "replicate", "sup_error"}, {}, {}};
    Table summary{"errors", {"n", "replicates", "median", "q10", "q90", "mean", "se"}, {}, {}};
    for (std::size_t k = 0; k < s.sizes.size(); ++k) {
        const std::size_t n = s.sizes[k];
        std::vector<double> errors(s.replicates);
        parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
            const auto seeds = replicate_seeds(s.master_seed, Tag::lln, k, r);
            const auto net = sample_network(n, s.p, s.q, seeds.network);
            const auto run = simulate(net, s.kernel, s.transfer, sim_config(s, Scaling::mean_field, seeds.process, true),
                                      s.backend);
            double sup = 0.0;
            for (std::size_t m = 0; m < run.grid.points(); ++m) {
                for (std::size_t i = 0; i < n; ++i) {
                    sup = std::max(sup, std::abs(run.full(m, i) - I.values[m]));
                }
            }
            errors[r] = sup;
        });
        record_seeds(report, "lln", n, Tag::lln, k, s.replicates, s.master_seed);
        for (std::size_t r = 0; r < s.replicates; ++r) {
            per.rows.push_back({static_cast<double>(n), static_cast<double>(r), errors[r]});
        }
        const auto sum = stats::summarize(errors);
        summary.rows.push_back({static_cast<double>(n), static_cast<double>(s.replicates), stats::median(errors),
                                stats::quantile(errors, 0.1), stats::quantile(errors, 0.9), sum.mean, sum.se});
    }
    report.tables = {summary, per};
    report.series.push_back(thinned("mean_field_I", -1, I.grid, I.values));
    return report;
}

std::vector<Verdict> judge_lln(const ExperimentReport& report, const Tolerances& tol) {
    const auto& t = report.table("errors");
    std::vector<Verdict> out;
    double worst = 0.0;
    double min_reps = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        min_reps = std::min(min_reps, t.at(r, "replicates"));
        if (r > 0) {
            const double prev = t.at(r - 1, "median");
            const double cur = t.at(r, "median");
            worst = std::max(worst, prev > 0.0 ? cur / prev : std::numeric_limits<double>::infinity());
        }
    }
    out.push_back({"median_strictly_decreasing", t.rows.size() >= 2 && worst < 1.0,
                   "median sup error strictly decreases with N (largest consecutive ratio < 1)", worst, 1.0, true});
    if (t.rows.size() >= 2) {
        const double first = t.at(0, "median");
        const double last = t.at(t.rows.size() - 1, "median");
        const double ratio = last > 0.0 ? first / last : std::numeric_limits<double>::infinity();
        std::ostringstream rule;
        rule << "median error ratio smallest/largest N within [" << tol.lln_ratio_low << ", " << tol.lln_ratio_high
             << "]";
        out.push_back({"error_ratio", ratio >= tol.lln_ratio_low && ratio <= tol.lln_ratio_high, rule.str(), ratio,
                       tol.lln_ratio_low, true});
    }
    out.push_back(replicate_verdict(min_reps, tol));
    return out;
}

// --- clt ---------------------------------------------------------------------

ExperimentReport clt_impl(const ExperimentSettings& s, const Tolerances&) {
    require_off_critical(s, "clt");
    require_replicates(s);
    if (s.tracked < 2) {
        throw ParameterError("clt experiment needs at least 2 tracked vertices");
    }
    ExperimentReport report;
    report.experiment = "clt";
    const std::size_t n = s.largest_size();
    if (s.tracked > n) {
        throw ParameterError("more tracked vertices than network vertices");
    }
    const std::size_t d = s.tracked + 1;
    const auto I = mean_field(s);
    const double I_T = I.back();
    const double root_n = std::sqrt(static_cast<double>(n));

    std::vector<std::vector<double>> finite(s.replicates);
    std::vector<double> lhs(s.replicates), rhs(s.replicates), spread(s.replicates);
    parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
        const auto seeds = replicate_seeds(s.master_seed, Tag::clt, 0, r);
        const auto net = sample_network(n, s.p, s.q, seeds.network);
        const auto run = simulate(net, s.kernel, s.transfer, sim_config(s, Scaling::mean_field, seeds.process, false),
                                  s.backend);
        const auto& fin = run.final_intensity;
        const double mean = std::accumulate(fin.begin(), fin.end(), 0.0) / static_cast<double>(n);
        std::vector<double> row{root_n * (mean - I_T)};
        for (std::size_t k = 0; k < s.tracked; ++k) {
            row.push_back(root_n * (fin[k] - I_T));
        }
        lhs[r] = root_n * (s.transfer(fin[0]) - s.transfer(I_T));
        rhs[r] = s.transfer.derivative(I_T) * row[1];
        spread[r] = std::abs(row[1] - row[0]);
        finite[r] = std::move(row);
    });
    record_seeds(report, "clt", n, Tag::clt, 0, s.replicates, s.master_seed);

    const auto ens = sample_fluctuation_ensemble(I, s.kernel, s.transfer, s.p, s.q, s.tracked, s.limit_samples,
                                                 derive_seed(s.master_seed, tag_for(Tag::clt, 255), 0), s.jobs);

    auto column = [](const std::vector<std::vector<double>>& rows, std::size_t a) {
        std::vector<double> out(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            out[r] = rows[r][a];
        }
        return out;
    };
    auto label = [](std::size_t a) { return a == 0 ? std::string("Kbar") : "K" + std::to_string(a); };

    Table cmp{"comparison",
              {"finite_value", "finite_se", "finite_count", "limit_value", "limit_se", "limit_count"},
              {},
              {}};
    const auto fcount = static_cast<double>(finite.size());
    const auto lcount = static_cast<double>(ens.terminal.size());
    for (std::size_t a = 0; a < d; ++a) {
        const auto f = stats::summarize(column(finite, a));
        const auto l = stats::summarize(column(ens.terminal, a));
        cmp.row_labels.push_back("mean_" + label(a));
        cmp.rows.push_back({f.mean, f.se, fcount, l.mean, l.se, lcount});
    }
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            const auto f = stats::covariance(column(finite, a), column(finite, b));
            const auto l = stats::covariance(column(ens.terminal, a), column(ens.terminal, b));
            cmp.row_labels.push_back("cov_" + label(a) + "_" + label(b));
            cmp.rows.push_back({f.value, f.se, fcount, l.value, l.se, lcount});
        }
    }

    // Diagonal minus off-diagonal, estimated symmetrically as Var(K1 - K2) / 2.
    Table structure{"structure", {"value", "se", "count"}, {}, {}};
    {
        const auto k1 = column(finite, 1);
        const auto k2 = column(finite, 2);
        std::vector<double> diff(k1.size());
        for (std::size_t r = 0; r < diff.size(); ++r) {
            diff[r] = k1[r] - k2[r];
        }
        const auto sd = stats::summarize(diff);
        structure.row_labels.push_back("diag_minus_offdiag");
        structure.rows.push_back({0.5 * sd.variance, 0.5 * sd.variance_se, fcount});
        structure.row_labels.push_back("max_abs_K1_minus_Kbar");
        structure.rows.push_back({*std::max_element(spread.begin(), spread.end()), 0.0, fcount});
    }

    Table lin{"linearization", {"rms_gap", "rms_lhs", "relative", "count"}, {}, {}};
    {
        double gap = 0.0, scale = 0.0;
        for (std::size_t r = 0; r < lhs.size(); ++r) {
            gap += (lhs[r] - rhs[r]) * (lhs[r] - rhs[r]);
            scale += lhs[r] * lhs[r];
        }
        gap = std::sqrt(gap / fcount);
        scale = std::sqrt(scale / fcount);
        lin.rows.push_back({gap, scale, scale > 0.0 ? gap / scale : 0.0, fcount});
    }

    Table per{"replicates", {"replicate"}, {}, {}};
    for (std::size_t a = 0; a < d; ++a) {
        per.columns.push_back(label(a));
    }
    per.columns.push_back("h_gap_lhs");
    per.columns.push_back("h_gap_rhs");
    for (std::size_t r = 0; r < finite.size(); ++r) {
        std::vector<double> row{static_cast<double>(r)};
        row.insert(row.end(), finite[r].begin(), finite[r].end());
        row.push_back(lhs[r]);
        row.push_back(rhs[r]);
        per.rows.push_back(std::move(row));
    }
    report.tables = {cmp, structure, lin, per};
    report.parameters["q"] = s.q;
    report.parameters["limit_seed"] = derive_seed(s.master_seed, tag_for(Tag::clt, 255), 0);
    return report;
}

std::vector<Verdict> judge_clt(const ExperimentReport& report, const Tolerances& tol) {
    std::vector<Verdict> out;
    const auto& cmp = report.table("comparison");
    for (std::size_t r = 0; r < cmp.rows.size(); ++r) {
        const auto& name = cmp.row_labels.at(r);
        const double diff = cmp.at(r, "finite_value") - cmp.at(r, "limit_value");
        const double pooled = std::hypot(cmp.at(r, "finite_se"), cmp.at(r, "limit_se"));
        out.push_back(within(name, diff, pooled, tol.covariance_pooled_se,
                             "finite-N and limit values agree within covariance_pooled_se pooled SE"));
    }
    const double q = report.parameters.value("q", 0.5);
    const auto& st = report.table("structure");
    if (q > 0.0 && q < 1.0) {
        const double value = st.at("diag_minus_offdiag", "value");
        const double se = st.at("diag_minus_offdiag", "se");
        const double z = se > 0.0 ? value / se : 0.0;
        out.push_back({"diagonal_exceeds_offdiagonal", z > tol.mean_se,
                       "Var(K1) - Cov(K1,K2) exceeds mean_se standard errors", z, tol.mean_se, true});
    } else if (q == 1.0) {
        const double gap = st.at("max_abs_K1_minus_Kbar", "value");
        out.push_back({"complete_graph_identity", gap <= 1e-9, "q = 1: K1 equals Kbar on every replicate", gap, 1e-9,
                       true});
    }
    const auto& lin = report.table("linearization");
    out.push_back({"linearization", lin.at(0, "relative") < tol.linearization_relative,
                   "rms gap between sqrt(N)(h(I^N)-h(I)) and h'(I)K^N relative to its scale", lin.at(0, "relative"),
                   tol.linearization_relative, true});
    out.push_back(replicate_verdict(cmp.at(0, "finite_count"), tol));
    return out;
}

// --- corollary ---------------------------------------------------------------

ExperimentReport corollary_impl(const ExperimentSettings& s, const Tolerances&) {
    require_off_critical(s, "corollary");
    require_replicates(s);
    ExperimentReport report;
    report.experiment = "corollary";
    const auto I = mean_field(s);
    const auto hI = transfer_integral(I, s.transfer);
    const double target = hI.back();

    Table sup{"sup_statistic", {"n", "replicates", "median", "q10", "q90"}, {}, {}};
    Table per{"replicates", {"n", "replicate", "sup_mean_compensated", "compensated_total", "centred_total"}, {}, {}};
    std::vector<double> b_stat, c_stat;
    for (std::size_t k = 0; k < s.sizes.size(); ++k) {
        const std::size_t n = s.sizes[k];
        const double root_n = std::sqrt(static_cast<double>(n));
        std::vector<double> a(s.replicates), b(s.replicates), c(s.replicates);
        parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
            const auto seeds = replicate_seeds(s.master_seed, Tag::corollary, k, r);
            const auto net = sample_network(n, s.p, s.q, seeds.network);
            const auto run = simulate(net, s.kernel, s.transfer, sim_config(s, Scaling::mean_field, seeds.process, true),
                                      s.backend);
            const auto paths = extract_martingale_paths(run, net, s.transfer, {});
            double worst = 0.0;
            for (double v : paths.mean_compensated) {
                worst = std::max(worst, std::abs(v));
            }
            a[r] = worst;
            b[r] = paths.total.back();
            c[r] = static_cast<double>(run.trains.total_events()) / root_n - root_n * target;
        });
        record_seeds(report, "corollary", n, Tag::corollary, k, s.replicates, s.master_seed);
        for (std::size_t r = 0; r < s.replicates; ++r) {
            per.rows.push_back({static_cast<double>(n), static_cast<double>(r), a[r], b[r], c[r]});
        }
        sup.rows.push_back({static_cast<double>(n), static_cast<double>(s.replicates), stats::median(a),
                            stats::quantile(a, 0.1), stats::quantile(a, 0.9)});
        if (k + 1 == s.sizes.size()) {
            b_stat = b;
            c_stat = c;
        }
    }

    const auto ens = sample_fluctuation_ensemble(I, s.kernel, s.transfer, s.p, s.q, 0, s.limit_samples,
                                                 derive_seed(s.master_seed, tag_for(Tag::corollary, 255), 0), s.jobs);
    const auto sb = stats::summarize(b_stat);
    const auto sc = stats::summarize(c_stat);
    const auto sl = stats::summarize(ens.total_count_limit);
    Table totals{"total_count",
                 {"mean", "se", "variance", "variance_se", "count", "target_mean", "target_mean_se", "target_variance",
                  "target_variance_se"},
                 {},
                 {}};
    totals.row_labels = {"compensated_total", "centred_total"};
    totals.rows.push_back({sb.mean, sb.se, sb.variance, sb.variance_se, static_cast<double>(sb.count), 0.0, 0.0, target,
                           0.0});
    totals.rows.push_back({sc.mean, sc.se, sc.variance, sc.variance_se, static_cast<double>(sc.count), sl.mean, sl.se,
                           sl.variance, sl.variance_se});
    report.tables = {sup, totals, per};
    report.parameters["integral_h_I"] = target;
    report.parameters["limit_seed"] = derive_seed(s.master_seed, tag_for(Tag::corollary, 255), 0);
    return report;
}

std::vector<Verdict> judge_corollary(const ExperimentReport& report, const Tolerances& tol) {
    std::vector<Verdict> out;
    const auto& sup = report.table("sup_statistic");
    if (sup.rows.size() >= 2) {
        const double first = sup.at(0, "median");
        const double last = sup.at(sup.rows.size() - 1, "median");
        out.push_back({"averaged_compensated_decreases", last < first,
                       "median sup |(1/N) sum_j (Z^j - C^j)| is smaller at the largest N than at the smallest", last,
                       first, true});
    }
    const auto& t = report.table("total_count");
    out.push_back(within("compensated_total_mean", t.at("compensated_total", "mean"), t.at("compensated_total", "se"),
                         tol.mean_se, "mean of (1/sqrt N) X^0_T within mean_se SE of 0"));
    out.push_back(within("compensated_total_variance",
                         t.at("compensated_total", "variance") - t.at("compensated_total", "target_variance"),
                         t.at("compensated_total", "variance_se"), tol.mean_se,
                         "variance of (1/sqrt N) X^0_T within mean_se SE of int h(I)"));
    out.push_back(within("centred_total_mean",
                         t.at("centred_total", "mean") - t.at("centred_total", "target_mean"),
                         std::hypot(t.at("centred_total", "se"), t.at("centred_total", "target_mean_se")), tol.mean_se,
                         "mean of (1/sqrt N) sum_j (Z^j_T - int h(I)) matches the limit within mean_se pooled SE"));
    out.push_back(within("centred_total_variance",
                         t.at("centred_total", "variance") - t.at("centred_total", "target_variance"),
                         std::hypot(t.at("centred_total", "variance_se"), t.at("centred_total", "target_variance_se")),
                         tol.covariance_pooled_se,
                         "variance of the centred total matches the coupled limit within covariance_pooled_se pooled SE"));
    out.push_back(replicate_verdict(t.at("compensated_total", "count"), tol));
    return out;
}

// --- critical ----------------------------------------------------------------

struct CriticalRun {
    double realized_00{0.0};
    double predicted_00{0.0};
    double realized_01{0.0};
    double predictable_01{0.0};
    double identity_residual{0.0};
    double increment_corr{0.0};
    std::vector<double> realized, predictable, mean_rate, limit;
    std::vector<double> drift0, drift1, m0, m1, idio0, idio1;
};

CriticalRun critical_run(const ExperimentSettings& s, const NetworkConfiguration& net, std::uint64_t seed) {
    const std::vector<std::size_t> tracked{0, 1};
    const auto run = simulate(net, s.kernel, s.transfer, sim_config(s, Scaling::critical, seed, true, tracked),
                              s.backend);
    const auto paths = extract_martingale_paths(run, net, s.transfer, tracked);
    CriticalRun out;
    const double T = s.horizon;
    const auto& c00 = paths.covariations.at(0);
    const auto& c01 = paths.covariations.at(1);
    const double q = net.q();
    out.realized_00 = c00.realized.back() / T;
    out.predicted_00 = q * (1.0 - q) * paths.mean_rate_integral.back() / T;
    out.realized_01 = c01.realized.back() / T;
    out.predictable_01 = c01.predictable.back() / T;
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t m = 0; m < paths.grid.points(); ++m) {
            const double expected = paths.idiosyncratic[k][m] + q * paths.common[m];
            out.identity_residual = std::max(out.identity_residual, std::abs(paths.vertex[k][m] - expected));
        }
    }
    const std::size_t M = paths.grid.intervals;
    std::vector<double> d0(M), d1(M);
    for (std::size_t m = 0; m < M; ++m) {
        d0[m] = paths.idiosyncratic[0][m + 1] - paths.idiosyncratic[0][m];
        d1[m] = paths.idiosyncratic[1][m + 1] - paths.idiosyncratic[1][m];
    }
    out.increment_corr = M >= 3 ? stats::pearson(d0, d1).value : 0.0;
    out.realized = c00.realized;
    out.predictable = c00.predictable;
    out.mean_rate = c00.mean_rate;
    out.limit = c00.limit;
    out.drift0 = paths.drift[0];
    out.drift1 = paths.drift[1];
    out.m0 = paths.vertex[0];
    out.m1 = paths.vertex[1];
    out.idio0 = paths.idiosyncratic[0];
    out.idio1 = paths.idiosyncratic[1];
    return out;
}

ExperimentReport critical_impl(const ExperimentSettings& s, const Tolerances&) {
    if (s.p != 0.5) {
        throw RegimeError("critical experiment needs p = 1/2 exactly");
    }
    require_replicates(s);
    ExperimentReport report;
    report.experiment = "critical";
    const std::size_t n = s.largest_size();
    if (n < 2) {
        throw ParameterError("critical experiment needs at least 2 vertices");
    }
    const auto grid = TimeGrid::from_step(s.horizon, s.resolved_step());
    const std::size_t keep = 5;

    std::vector<CriticalRun> random(s.replicates);
    parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
        const auto seeds = replicate_seeds(s.master_seed, Tag::critical, 0, r);
        const auto net = sample_network(n, s.p, s.q, seeds.network);
        random[r] = critical_run(s, net, seeds.process);
    });
    record_seeds(report, "critical_random", n, Tag::critical, 0, s.replicates, s.master_seed);

    Table per{"random_graph",
              {"replicate", "realized_slope_00", "predicted_slope_00", "realized_slope_01", "predictable_slope_01",
               "identity_residual"},
              {},
              {}};
    std::vector<double> r00, p00, r01;
    for (std::size_t r = 0; r < random.size(); ++r) {
        const auto& c = random[r];
        per.rows.push_back({static_cast<double>(r), c.realized_00, c.predicted_00, c.realized_01, c.predictable_01,
                            c.identity_residual});
        r00.push_back(c.realized_00);
        p00.push_back(c.predicted_00);
        r01.push_back(c.realized_01);
    }
    const auto s_r00 = stats::summarize(r00);
    const auto s_p00 = stats::summarize(p00);
    const auto s_r01 = stats::summarize(r01);
    double worst_residual = 0.0;
    for (const auto& c : random) {
        worst_residual = std::max(worst_residual, c.identity_residual);
    }
    Table summary{"random_summary", {"value", "se", "count", "reference"}, {}, {}};
    summary.row_labels = {"slope_00", "slope_01", "identity_residual"};
    summary.rows.push_back({s_r00.mean, s_r00.se, static_cast<double>(s_r00.count), s_p00.mean});
    summary.rows.push_back({s_r01.mean, s_r01.se, static_cast<double>(s_r01.count), 0.0});
    summary.rows.push_back({worst_residual, 0.0, static_cast<double>(random.size()), 0.0});
    report.tables = {summary, per};

    auto collect = [](const std::vector<CriticalRun>& runs, auto member) {
        std::vector<std::vector<double>> out;
        out.reserve(runs.size());
        for (const auto& c : runs) {
            out.push_back(c.*member);
        }
        return out;
    };
    add_band(report, "cov00_realized", grid, collect(random, &CriticalRun::realized), keep);
    add_band(report, "cov00_predictable", grid, collect(random, &CriticalRun::predictable), keep);
    add_band(report, "cov00_mean_rate", grid, collect(random, &CriticalRun::mean_rate), keep);
    add_band(report, "cov00_limit", grid, collect(random, &CriticalRun::limit), keep);

    if (s.complementary) {
        const auto net = s.network_override ? *s.network_override : build_complementary_network(n, s.complementary_seed);
        if (net.size() < 2) {
            throw ParameterError("complementary network needs at least 2 vertices");
        }
        std::vector<CriticalRun> comp(s.replicates);
        parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
            const auto seeds = replicate_seeds(s.master_seed, Tag::critical, 1, r);
            comp[r] = critical_run(s, net, seeds.process);
        });
        for (std::size_t r = 0; r < s.replicates; ++r) {
            const auto seeds = replicate_seeds(s.master_seed, Tag::critical, 1, r);
            report.seeds.push_back({"critical_complementary", net.size(), r, net.seed(), seeds.process});
        }
        Table cper{"complementary", {"replicate", "increment_corr", "identity_residual"}, {}, {}};
        std::vector<double> corr;
        for (std::size_t r = 0; r < comp.size(); ++r) {
            cper.rows.push_back({static_cast<double>(r), comp[r].increment_corr, comp[r].identity_residual});
            corr.push_back(comp[r].increment_corr);
        }
        const auto sign = stats::sign_test_negative(corr);
        const auto sc = stats::summarize(corr);

        // Paired drift difference between vertices 0 and 1, standardized pointwise.
        std::vector<std::vector<double>> diff;
        for (const auto& c : comp) {
            std::vector<double> d(c.drift0.size());
            for (std::size_t m = 0; m < d.size(); ++m) {
                d[m] = c.drift0[m] - c.drift1[m];
            }
            diff.push_back(std::move(d));
        }
        double best = 0.0, best_t = 0.0, best_mean = 0.0, best_se = 0.0;
        if (diff.size() >= 2) {
            auto [mean, se] = band(diff);
            for (std::size_t m = 0; m < mean.size(); ++m) {
                if (se[m] > 0.0 && std::abs(mean[m]) / se[m] > best) {
                    best = std::abs(mean[m]) / se[m];
                    best_t = grid.time(m);
                    best_mean = mean[m];
                    best_se = se[m];
                }
            }
        }
        Table csum{"complementary_summary", {"value", "se", "count", "aux"}, {}, {}};
        csum.row_labels = {"increment_corr", "sign_test", "drift_difference"};
        csum.rows.push_back({sc.mean, sc.se, static_cast<double>(sc.count), 0.0});
        csum.rows.push_back({sign.statistic, sign.p_value, static_cast<double>(corr.size()), 0.0});
        csum.rows.push_back({best_mean, best_se, static_cast<double>(diff.size()), best_t});
        report.tables.push_back(csum);
        report.tables.push_back(cper);
        report.parameters["complementary_network"] = network_to_json(net, false);

        add_band(report, "drift_vertex0", grid, collect(comp, &CriticalRun::drift0), keep);
        add_band(report, "drift_vertex1", grid, collect(comp, &CriticalRun::drift1), keep);
        add_band(report, "martingale_vertex0", grid, collect(comp, &CriticalRun::m0), keep);
        add_band(report, "martingale_vertex1", grid, collect(comp, &CriticalRun::m1), keep);
        add_band(report, "idiosyncratic_vertex0", grid, collect(comp, &CriticalRun::idio0), keep);
        add_band(report, "idiosyncratic_vertex1", grid, collect(comp, &CriticalRun::idio1), keep);
    }
    return report;
}

std::vector<Verdict> judge_critical(const ExperimentReport& report, const Tolerances& tol) {
    std::vector<Verdict> out;
    const auto& t = report.table("random_summary");
    const double realized = t.at("slope_00", "value");
    const double predicted = t.at("slope_00", "reference");
    const double rel = predicted > 0.0 ? std::abs(realized / predicted - 1.0)
                                       : (realized == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    out.push_back({"idiosyncratic_slope", rel <= tol.critical_slope_relative,
                   "time-averaged slope of [Mt0,Mt0] within critical_slope_relative of q(1-q) mean hbar", rel,
                   tol.critical_slope_relative, true});
    out.push_back(within("cross_slope_zero", t.at("slope_01", "value"), t.at("slope_01", "se"), tol.mean_se,
                         "slope of [Mt0,Mt1] on random graphs within mean_se SE of 0"));
    const double residual = t.at("identity_residual", "value");
    out.push_back({"martingale_split_identity", residual <= 1e-9, "M^k = Mt^k + q M on every grid point", residual,
                   1e-9, true});
    for (const auto& table : report.tables) {
        if (table.name == "complementary_summary") {
            const double p = table.at("sign_test", "se");
            out.push_back({"complementary_negative_correlation", p < tol.alpha,
                           "one-sided sign test on increment correlations of (Mt0, Mt1) rejects at alpha", p, tol.alpha,
                           true});
            const double mean = table.at("drift_difference", "value");
            const double se = table.at("drift_difference", "se");
            const double z = se > 0.0 ? std::abs(mean) / se : 0.0;
            out.push_back({"complementary_drift_discrepancy", z > tol.mean_se,
                           "drift paths of vertices 0 and 1 differ by more than mean_se paired SE at some grid time", z,
                           tol.mean_se, true});
        }
    }
    out.push_back(replicate_verdict(t.at("slope_00", "count"), tol));
    return out;
}

// --- independence ------------------------------------------------------------

ExperimentReport independence_impl(const ExperimentSettings& s, const Tolerances&) {
    require_off_critical(s, "independence");
    require_replicates(s);
    if (s.tracked < 2) {
        throw ParameterError("independence experiment needs at least 2 vertices");
    }
    ExperimentReport report;
    report.experiment = "independence";
    const auto I = mean_field(s);
    const double target = transfer_integral(I, s.transfer).back();
    const std::size_t m = s.tracked;

    Table corr{"correlations", {"n", "k", "l", "corr", "se", "replicates"}, {}, {}};
    Table summary{"summary", {"n", "replicates", "median_abs_corr", "max_abs_z"}, {}, {}};
    Table marginal{"marginal", {"n", "mean_count", "se", "count", "target", "chi_square", "p_value"}, {}, {}};
    for (std::size_t k = 0; k < s.sizes.size(); ++k) {
        const std::size_t n = s.sizes[k];
        if (m > n) {
            throw ParameterError("more tracked vertices than network vertices");
        }
        std::vector<std::vector<double>> counts(s.replicates);
        parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
            const auto seeds = replicate_seeds(s.master_seed, Tag::independence, k, r);
            const auto net = sample_network(n, s.p, s.q, seeds.network);
            const auto run = simulate(net, s.kernel, s.transfer,
                                      sim_config(s, Scaling::mean_field, seeds.process, false), s.backend);
            std::vector<double> row(m);
            for (std::size_t v = 0; v < m; ++v) {
                row[v] = static_cast<double>(run.trains.times[v].size());
            }
            counts[r] = std::move(row);
        });
        record_seeds(report, "independence", n, Tag::independence, k, s.replicates, s.master_seed);
        std::vector<double> abs_corr;
        double max_z = 0.0;
        std::vector<double> xs(s.replicates), ys(s.replicates);
        for (std::size_t a = 0; a < m; ++a) {
            for (std::size_t b = a + 1; b < m; ++b) {
                for (std::size_t r = 0; r < s.replicates; ++r) {
                    xs[r] = counts[r][a];
                    ys[r] = counts[r][b];
                }
                const auto c = stats::pearson(xs, ys);
                // Null standard error 1/sqrt(n-1) for testing zero correlation.
                const double se = 1.0 / std::sqrt(static_cast<double>(s.replicates) - 1.0);
                corr.rows.push_back({static_cast<double>(n), static_cast<double>(a), static_cast<double>(b), c.value, se,
                                     static_cast<double>(s.replicates)});
                abs_corr.push_back(std::abs(c.value));
                max_z = std::max(max_z, std::abs(c.value) / se);
            }
        }
        summary.rows.push_back(
            {static_cast<double>(n), static_cast<double>(s.replicates), stats::median(abs_corr), max_z});

        std::vector<double> pooled;
        std::vector<long> ints;
        for (const auto& row : counts) {
            for (double v : row) {
                pooled.push_back(v);
                ints.push_back(static_cast<long>(v));
            }
        }
        const auto sp = stats::summarize(pooled);
        const auto chi = target > 0.0 ? stats::chi_square_poisson(ints, target) : stats::TestResult{};
        marginal.rows.push_back({static_cast<double>(n), sp.mean, sp.se, static_cast<double>(sp.count), target,
                                 chi.statistic, chi.p_value});
    }
    report.tables = {summary, marginal, corr};
    return report;
}

std::vector<Verdict> judge_independence(const ExperimentReport& report, const Tolerances& tol) {
    std::vector<Verdict> out;
    const auto& summary = report.table("summary");
    const auto& marginal = report.table("marginal");
    const std::size_t last = summary.rows.size() - 1;
    out.push_back({"pairwise_correlation_zero", summary.at(last, "max_abs_z") <= tol.mean_se,
                   "every pairwise count correlation at the largest N within mean_se SE of 0",
                   summary.at(last, "max_abs_z"), tol.mean_se, true});
    out.push_back(within("marginal_mean", marginal.at(last, "mean_count") - marginal.at(last, "target"),
                         marginal.at(last, "se"), tol.mean_se, "mean count within mean_se SE of int h(I)"));
    out.push_back({"marginal_poisson", marginal.at(last, "p_value") >= tol.alpha,
                   "chi-square of counts against Poisson(int h(I)) not rejected at alpha",
                   marginal.at(last, "p_value"), tol.alpha, true});
    if (summary.rows.size() >= 2) {
        // Sampling noise of order 1/sqrt(replicates) dominates the true correlation
        // at every N, so this trend is reported but does not gate.
        out.push_back({"correlation_shrinks", summary.at(last, "median_abs_corr") < summary.at(0, "median_abs_corr"),
                       "median |corr| smaller at the largest N than at the smallest (informational)",
                       summary.at(last, "median_abs_corr"), summary.at(0, "median_abs_corr"), false});
    }
    out.push_back(replicate_verdict(summary.at(last, "replicates"), tol));
    return out;
}

// --- backend -----------------------------------------------------------------

ExperimentReport backend_impl(const ExperimentSettings& s, const Tolerances&) {
    require_replicates(s);
    ExperimentReport report;
    report.experiment = "backend";
    const std::size_t n = s.largest_size();
    const Scaling scaling = s.p == 0.5 ? Scaling::critical : Scaling::mean_field;
    Table per{"replicates", {"replicate", "thinning_mean_count", "timechange_mean_count", "thinning_I0",
                             "timechange_I0"}, {}, {}};
    std::vector<std::array<double, 4>> rows(s.replicates);
    parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
        const auto seeds = replicate_seeds(s.master_seed, Tag::backend, 0, r);
        const auto net = sample_network(n, s.p, s.q, seeds.network);
        const auto cfg = sim_config(s, scaling, seeds.process, false);
        const auto a = simulate_thinning(net, s.kernel, s.transfer, cfg);
        const auto b = simulate_time_change(net, s.kernel, s.transfer, cfg);
        const auto dn = static_cast<double>(n);
        rows[r] = {static_cast<double>(a.trains.total_events()) / dn, static_cast<double>(b.trains.total_events()) / dn,
                   a.final_intensity[0], b.final_intensity[0]};
    });
    record_seeds(report, "backend", n, Tag::backend, 0, s.replicates, s.master_seed);
    std::array<std::vector<double>, 4> cols;
    for (std::size_t r = 0; r < rows.size(); ++r) {
        per.rows.push_back({static_cast<double>(r), rows[r][0], rows[r][1], rows[r][2], rows[r][3]});
        for (std::size_t c = 0; c < 4; ++c) {
            cols[c].push_back(rows[r][c]);
        }
    }
    Table summary{"summary", {"thinning", "thinning_se", "timechange", "timechange_se", "count", "p_value"}, {}, {}};
    summary.row_labels = {"mean_count", "intensity_vertex0"};
    for (std::size_t k = 0; k < 2; ++k) {
        const auto a = stats::summarize(cols[2 * k]);
        const auto b = stats::summarize(cols[2 * k + 1]);
        const auto ks = stats::ks_two_sample(cols[2 * k], cols[2 * k + 1]);
        summary.rows.push_back({a.mean, a.se, b.mean, b.se, static_cast<double>(a.count), ks.p_value});
    }
    report.tables = {summary, per};
    return report;
}

std::vector<Verdict> judge_backend(const ExperimentReport& report, const Tolerances& tol) {
    std::vector<Verdict> out;
    const auto& t = report.table("summary");
    for (const auto* row : {"mean_count", "intensity_vertex0"}) {
        out.push_back(within(std::string(row) + "_agree", t.at(row, "thinning") - t.at(row, "timechange"),
                             std::hypot(t.at(row, "thinning_se"), t.at(row, "timechange_se")), tol.mean_se,
                             "thinning and time-change means agree within mean_se pooled SE"));
    }
    out.push_back({"intensity_vertex0_law", t.at("intensity_vertex0", "p_value") >= tol.alpha,
                   "two-sample KS on I^{N,0}_T across backends not rejected at alpha (informational)",
                   t.at("intensity_vertex0", "p_value"), tol.alpha, false});
    out.push_back(replicate_verdict(t.at("mean_count", "count"), tol));
    return out;
}

// --- weights -----------------------------------------------------------------

ExperimentReport weights_impl(const ExperimentSettings& s, const Tolerances&) {
    require_replicates(s);
    ExperimentReport report;
    report.experiment = "weights";
    const std::size_t n = s.largest_size();
    std::vector<double> w(s.replicates), msq(s.replicates), residual(s.replicates);
    parallel_for(s.replicates, s.jobs, [&](std::size_t r) {
        const auto seeds = replicate_seeds(s.master_seed, Tag::weights, 0, r);
        const auto net = sample_network(n, s.p, s.q, seeds.network);
        const auto ws = compute_weight_statistics(net);
        w[r] = ws.W_N;
        msq[r] = ws.mean_square_W;
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(ws.W_N_i[i] - (net.q() * ws.W_N + ws.W_tilde[i])));
        }
        residual[r] = worst;
    });
    record_seeds(report, "weights", n, Tag::weights, 0, s.replicates, s.master_seed);
    const auto sw = stats::summarize(w);
    const auto sm = stats::summarize(msq);
    const double c = 4.0 * s.p * (1.0 - s.p);
    Table t{"moments", {"value", "se", "count", "target"}, {}, {}};
    t.row_labels = {"variance_W", "mean_square_W_i", "identity_residual"};
    t.rows.push_back({sw.variance, sw.variance_se, static_cast<double>(sw.count), c});
    t.rows.push_back({sm.mean, sm.se, static_cast<double>(sm.count), s.q * s.q * c + s.q * (1.0 - s.q)});
    t.rows.push_back({*std::max_element(residual.begin(), residual.end()), 0.0, static_cast<double>(s.replicates), 0.0});
    report.tables = {t};
    return report;
}

std::vector<Verdict> judge_weights(const ExperimentReport& report, const Tolerances& tol) {
    const auto& t = report.table("moments");
    std::vector<Verdict> out;
    out.push_back(within("variance_W", t.at("variance_W", "value") - t.at("variance_W", "target"),
                         t.at("variance_W", "se"), tol.mean_se, "Var(W^N) within mean_se SE of 4p(1-p)"));
    out.push_back(within("mean_square_W_i", t.at("mean_square_W_i", "value") - t.at("mean_square_W_i", "target"),
                         t.at("mean_square_W_i", "se"), tol.mean_se,
                         "mean of (1/N) sum_i (W^{N,i})^2 within mean_se SE of q^2 4p(1-p) + q(1-q)"));
    const double res = t.at("identity_residual", "value");
    out.push_back({"weight_split_identity", res <= 1e-9, "W^{N,i} = q W^N + Wt^{N,i} for every i", res, 1e-9, true});
    out.push_back(replicate_verdict(t.at("variance_W", "count"), tol));
    return out;
}

// --- convolution bound -------------------------------------------------------

ExperimentReport convolution_impl(const ExperimentSettings& s, const Tolerances&) {
    ExperimentReport report;
    report.experiment = "convolution_bound";
    const auto& phi = s.kernel;
    RandomStream rng(s.master_seed, StreamPurpose::test_paths);
    Table per{"paths", {"path", "t", "jumps", "sup_conv_sq", "sup_J_sq", "constant"}, {}, {}};
    std::size_t violations_linear = 0, violations_square = 0;
    double worst_linear = 0.0, worst_square = 0.0;
    constexpr double max_jump = 1.0;
    constexpr std::size_t probes = 256;
    for (std::size_t k = 0; k < s.paths; ++k) {
        const double t = 0.1 + rng.uniform() * (s.horizon - 0.1);
        const std::size_t jumps = 1 + static_cast<std::size_t>(rng.below(20));
        std::vector<double> times(jumps), sizes(jumps);
        for (auto& u : times) {
            u = rng.uniform() * t;
        }
        std::sort(times.begin(), times.end());
        for (auto& a : sizes) {
            a = (2.0 * rng.uniform() - 1.0) * max_jump;
        }
        double J = 0.0, sup_j = 0.0;
        for (double a : sizes) {
            J += a;
            sup_j = std::max(sup_j, J * J);
        }
        // The sup of the convolution is approached right after a jump or between jumps;
        // probe both: right limits at every jump time and a uniform grid.
        auto conv_at = [&](double at, bool inclusive) {
            double total = 0.0;
            for (std::size_t i = 0; i < jumps; ++i) {
                if (times[i] < at || (inclusive && times[i] <= at)) {
                    total += sizes[i] * phi(at - times[i]);
                }
            }
            return total;
        };
        double sup_c = 0.0;
        for (double u : times) {
            sup_c = std::max(sup_c, std::pow(conv_at(u, true), 2));
        }
        for (std::size_t g = 0; g <= probes; ++g) {
            sup_c = std::max(sup_c, std::pow(conv_at(t * static_cast<double>(g) / probes, false), 2));
        }
        const double C = phi.sup_norm() + t * phi.derivative_sup_norm();
        const double ratio_linear = sup_j > 0.0 ? sup_c / (C * sup_j) : 0.0;
        const double ratio_square = sup_j > 0.0 ? sup_c / (C * C * sup_j) : 0.0;
        worst_linear = std::max(worst_linear, ratio_linear);
        worst_square = std::max(worst_square, ratio_square);
        violations_linear += ratio_linear > 1.0 + 1e-12 ? 1 : 0;
        violations_square += ratio_square > 1.0 + 1e-12 ? 1 : 0;
        per.rows.push_back({static_cast<double>(k), t, static_cast<double>(jumps), sup_c, sup_j, C});
    }
    Table summary{"violations", {"paths", "violations", "worst_ratio"}, {}, {}};
    summary.row_labels = {"linear_constant", "squared_constant"};
    summary.rows.push_back({static_cast<double>(s.paths), static_cast<double>(violations_linear), worst_linear});
    summary.rows.push_back({static_cast<double>(s.paths), static_cast<double>(violations_square), worst_square});
    report.tables = {summary, per};
    report.parameters["max_jump"] = max_jump;
    report.parameters["seed"] = s.master_seed;
    return report;
}

std::vector<Verdict> judge_convolution(const ExperimentReport& report, const Tolerances&) {
    const auto& t = report.table("violations");
    return {{"linear_constant_bound", t.at("linear_constant", "violations") == 0.0,
             "sup (phi * dJ)^2 <= (||phi|| + t||phi'||) sup J^2 on every path", t.at("linear_constant", "violations"),
             0.0, true},
            {"squared_constant_bound", t.at("squared_constant", "violations") == 0.0,
             "sup (phi * dJ)^2 <= (||phi|| + t||phi'||)^2 sup J^2 on every path",
             t.at("squared_constant", "violations"), 0.0, true}};
}

template <typename Impl>
ExperimentReport finish(Impl impl, const ExperimentSettings& s, const Tolerances& tol) {
    auto report = impl(s, tol);
    auto params = to_json(s);
    for (auto& [key, value] : report.parameters.items()) {
        params[key] = value;
    }
    params["tolerances"] = to_json(tol);
    report.parameters = std::move(params);
    report.verdicts = judge(report, tol);
    return report;
}

} // namespace

std::vector<Verdict> judge(const ExperimentReport& report, const Tolerances& tol) {
    const auto& e = report.experiment;
    if (e == "lln") {
        return judge_lln(report, tol);
    }
    if (e == "clt") {
        return judge_clt(report, tol);
    }
    if (e == "corollary") {
        return judge_corollary(report, tol);
    }
    if (e == "critical") {
        return judge_critical(report, tol);
    }
    if (e == "independence") {
        return judge_independence(report, tol);
    }
    if (e == "backend") {
        return judge_backend(report, tol);
    }
    if (e == "weights") {
        return judge_weights(report, tol);
    }
    if (e == "convolution_bound") {
        return judge_convolution(report, tol);
    }
    throw ParameterError("unknown experiment '" + e + "'");
}

ExperimentReport lln_experiment(const ExperimentSettings& s, const Tolerances& tol) { return finish(lln_impl, s, tol); }
ExperimentReport clt_experiment(const ExperimentSettings& s, const Tolerances& tol) { return finish(clt_impl, s, tol); }
ExperimentReport corollary_experiment(const ExperimentSettings& s, const Tolerances& tol) {
    return finish(corollary_impl, s, tol);
}
ExperimentReport critical_experiment(const ExperimentSettings& s, const Tolerances& tol) {
    return finish(critical_impl, s, tol);
}
ExperimentReport independence_experiment(const ExperimentSettings& s, const Tolerances& tol) {
    return finish(independence_impl, s, tol);
}
ExperimentReport backend_experiment(const ExperimentSettings& s, const Tolerances& tol) {
    return finish(backend_impl, s, tol);
}
ExperimentReport weights_experiment(const ExperimentSettings& s, const Tolerances& tol) {
    return finish(weights_impl, s, tol);
}
ExperimentReport convolution_bound_experiment(const ExperimentSettings& s, const Tolerances& tol) {
    return finish(convolution_impl, s, tol);
}

std::vector<std::string> experiment_names() {
    return {"lln", "clt", "corollary", "critical", "independence", "backend", "weights", "convolution_bound"};
}

ExperimentReport run_experiment(const std::string& name, const ExperimentSettings& s, const Tolerances& tol) {
    if (name == "lln") {
        return lln_experiment(s, tol);
    }
    if (name == "clt") {
        return clt_experiment(s, tol);
    }
    if (name == "corollary") {
        return corollary_experiment(s, tol);
    }
    if (name == "critical") {
        return critical_experiment(s, tol);
    }
    if (name == "independence") {
        return independence_experiment(s, tol);
    }
    if (name == "backend") {
        return backend_experiment(s, tol);
    }
    if (name == "weights") {
        return weights_experiment(s, tol);
    }
    if (name == "convolution_bound") {
        return convolution_bound_experiment(s, tol);
    }
    throw ParameterError("unknown experiment '" + name + "'");
}

namespace {

// JSON has no non-finite numbers; they travel as the strings "nan", "inf", "-inf".
json encode(double x) {
    if (std::isfinite(x)) {
        return x;
    }
    return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

json encode(const std::vector<double>& xs) {
    json out = json::array();
    for (double x : xs) {
        out.push_back(encode(x));
    }
    return out;
}

double decode(const json& v) {
    if (v.is_number()) {
        return v.get<double>();
    }
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        if (s == "inf") {
            return std::numeric_limits<double>::infinity();
        }
        if (s == "-inf") {
            return -std::numeric_limits<double>::infinity();
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> decode_all(const json& v) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& x : v) {
        out.push_back(decode(x));
    }
    return out;
}

} // namespace

json report_to_json(const ExperimentReport& report) {
    json j;
    j["experiment"] = report.experiment;
    j["parameters"] = report.parameters;
    j["passed"] = report.passed();
    j["tables"] = json::array();
    for (const auto& t : report.tables) {
        json rows = json::array();
        for (const auto& row : t.rows) {
            rows.push_back(encode(row));
        }
        j["tables"].push_back({{"name", t.name}, {"columns", t.columns}, {"row_labels", t.row_labels}, {"rows", rows}});
    }
    j["verdicts"] = json::array();
    for (const auto& v : report.verdicts) {
        j["verdicts"].push_back({{"name", v.name},
                                 {"passed", v.passed},
                                 {"rule", v.rule},
                                 {"statistic", encode(v.statistic)},
                                 {"threshold", encode(v.threshold)},
                                 {"gating", v.gating}});
    }
    j["series"] = json::array();
    for (const auto& s : report.series) {
        j["series"].push_back({{"name", s.name}, {"replicate", s.replicate}, {"t", encode(s.t)}, {"value", encode(s.value)}});
    }
    j["seeds"] = json::array();
    for (const auto& s : report.seeds) {
        j["seeds"].push_back({{"label", s.label},
                              {"n", s.n},
                              {"replicate", s.replicate},
                              {"network_seed", s.network_seed},
                              {"process_seed", s.process_seed}});
    }
    return j;
}

ExperimentReport report_from_json(const json& j) {
    ExperimentReport r;
    r.experiment = j.at("experiment").get<std::string>();
    r.parameters = j.value("parameters", json::object());
    for (const auto& t : j.value("tables", json::array())) {
        Table table;
        table.name = t.at("name").get<std::string>();
        table.columns = t.at("columns").get<std::vector<std::string>>();
        table.row_labels = t.value("row_labels", std::vector<std::string>{});
        for (const auto& row : t.at("rows")) {
            table.rows.push_back(decode_all(row));
        }
        r.tables.push_back(std::move(table));
    }
    for (const auto& v : j.value("verdicts", json::array())) {
        r.verdicts.push_back({v.at("name").get<std::string>(), v.at("passed").get<bool>(), v.value("rule", ""),
                              decode(v.value("statistic", json())), decode(v.value("threshold", json())),
                              v.value("gating", true)});
    }
    for (const auto& s : j.value("series", json::array())) {
        r.series.push_back({s.at("name").get<std::string>(), s.value("replicate", -1L),
                            decode_all(s.at("t")), decode_all(s.at("value"))});
    }
    for (const auto& s : j.value("seeds", json::array())) {
        r.seeds.push_back({s.value("label", ""), s.value("n", std::size_t{0}), s.value("replicate", std::size_t{0}),
                           s.value("network_seed", std::uint64_t{0}), s.value("process_seed", std::uint64_t{0})});
    }
    return r;
}

} // namespace hawkes_mf
