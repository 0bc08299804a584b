#include "hawkes_mf/simulator.hpp"

#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/random.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <memory>
#include <queue>

namespace hawkes_mf {

double scaling_factor(Scaling scaling, std::size_t n) {
    const auto dn = static_cast<double>(n);
    return scaling == Scaling::critical ? 1.0 / std::sqrt(dn) : 1.0 / dn;
}

std::string to_string(Scaling scaling) { return scaling == Scaling::critical ? "critical" : "mean_field"; }

std::string to_string(Backend backend) { return backend == Backend::time_change ? "timechange" : "thinning"; }

Scaling parse_scaling(const std::string& name) {
    if (name == "mean_field") {
        return Scaling::mean_field;
    }
    if (name == "critical") {
        return Scaling::critical;
    }
    throw ParameterError("unknown scaling '" + name + "' (expected mean_field or critical)");
}

Backend parse_backend(const std::string& name) {
    if (name == "thinning") {
        return Backend::thinning;
    }
    if (name == "timechange" || name == "time_change") {
        return Backend::time_change;
    }
    throw ParameterError("unknown backend '" + name + "' (expected thinning or timechange)");
}

std::size_t SpikeTrains::total_events() const noexcept {
    std::size_t total = 0;
    for (const auto& train : times) {
        total += train.size();
    }
    return total;
}

std::size_t SpikeTrains::count_before(std::size_t vertex, double t) const {
    const auto& train = times.at(vertex);
    return static_cast<std::size_t>(std::lower_bound(train.begin(), train.end(), t) - train.begin());
}

namespace {

// Summed input S_i(t) = theta sum_j U_j V_ji sum_{u < t} phi(t - u), queried as a left limit.
class IntensityState {
public:
    virtual ~IntensityState() = default;
    virtual double value(std::size_t vertex, double t) = 0;
    virtual void snapshot(double t, std::span<double> out) = 0;
    virtual void on_event(std::size_t source, double t) = 0;
};

// Exponential kernel: S_i(t) = A_i exp(-lambda (t - base)), one exp per query.
class ExponentialState final : public IntensityState {
public:
    ExponentialState(const NetworkConfiguration& net, double rate, double theta)
        : net_(net), rate_(rate), theta_(theta), scaled_(net.size(), 0.0) {}

    double value(std::size_t vertex, double t) override {
        return scaled_[vertex] * std::exp(-rate_ * (t - base_));
    }

    void snapshot(double t, std::span<double> out) override {
        const double factor = std::exp(-rate_ * (t - base_));
        for (std::size_t i = 0; i < scaled_.size(); ++i) {
            out[i] = scaled_[i] * factor;
        }
    }

    void on_event(std::size_t source, double t) override {
        if (rate_ * (t - base_) > kRebaseExponent) {
            const double factor = std::exp(-rate_ * (t - base_));
            for (auto& a : scaled_) {
                a *= factor;
            }
            base_ = t;
        }
        const double weight = theta_ * net_.sign(source) * std::exp(rate_ * (t - base_));
        for (auto i : net_.targets(source)) {
            scaled_[i] += weight;
        }
    }

private:
    static constexpr double kRebaseExponent = 20.0;

    const NetworkConfiguration& net_;
    double rate_;
    double theta_;
    double base_{0.0};
    std::vector<double> scaled_;
};

// General kernel: recompute from per-vertex event histories truncated at a fixed age.
class HistoryState final : public IntensityState {
public:
    HistoryState(const NetworkConfiguration& net, const Kernel& kernel, double theta, double tolerance)
        : net_(net), kernel_(kernel), theta_(theta), max_age_(kernel.truncation_age(tolerance)),
          history_(net.size()) {}

    double value(std::size_t vertex, double t) override {
        double total = 0.0;
        for (auto j : net_.sources(vertex)) {
            double own = 0.0;
            const auto& events = history_[j];
            for (auto it = events.rbegin(); it != events.rend(); ++it) {
                const double age = t - *it;
                if (age <= 0.0) {
                    continue;
                }
                if (age >= max_age_) {
                    break;
                }
                own += kernel_(age);
            }
            total += net_.sign(j) * own;
        }
        return theta_ * total;
    }

    void snapshot(double t, std::span<double> out) override {
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = value(i, t);
        }
    }

    void on_event(std::size_t source, double t) override {
        auto& events = history_[source];
        while (!events.empty() && t - events.front() >= max_age_) {
            events.pop_front();
        }
        events.push_back(t);
    }

private:
    const NetworkConfiguration& net_;
    const Kernel& kernel_;
    double theta_;
    double max_age_;
    std::vector<std::deque<double>> history_;
};

// Writes grid snapshots as simulated time passes.
class Recorder {
public:
    Recorder(SimulationResult& result, std::size_t n, bool full) : result_(result), n_(n), full_(full) {
        result_.tracked_paths.assign(result_.tracked.size(), std::vector<double>(result_.grid.points(), 0.0));
        if (full_) {
            result_.full_paths.assign(result_.grid.points() * n_, 0.0);
        }
    }

    // Record every node t_m <= t that has not been recorded yet.
    void advance_to(double t, IntensityState& state) {
        while (next_ < result_.grid.points() && result_.grid.time(next_) <= t) {
            const double tm = result_.grid.time(next_);
            for (std::size_t k = 0; k < result_.tracked.size(); ++k) {
                result_.tracked_paths[k][next_] = state.value(result_.tracked[k], tm);
            }
            if (full_) {
                state.snapshot(tm, std::span<double>(result_.full_paths).subspan(next_ * n_, n_));
            }
            ++next_;
        }
    }

    void finish(IntensityState& state) {
        advance_to(result_.grid.horizon, state);
        result_.final_intensity.assign(n_, 0.0);
        state.snapshot(result_.grid.horizon, result_.final_intensity);
    }

private:
    SimulationResult& result_;
    std::size_t n_;
    bool full_;
    std::size_t next_{0};
};

struct Prepared {
    SimulationResult result;
    std::unique_ptr<IntensityState> state;
    double envelope{0.0};
};

Prepared prepare(const NetworkConfiguration& net, const Kernel& kernel, const TransferFunction& h,
                 const SimulationConfig& config) {
    const std::size_t n = net.size();
    if (n == 0) {
        throw ParameterError("simulation needs at least one vertex");
    }
    if (!std::isfinite(h.sup_norm())) {
        throw UnsupportedTransferError("thinning needs a bounded transfer function; " + h.id() +
                                       " has infinite sup norm");
    }
    if (!(config.horizon >= 0.0) || !std::isfinite(config.horizon)) {
        throw ParameterError("horizon must be finite and >= 0");
    }
    for (auto v : config.tracked) {
        if (v >= n) {
            throw ParameterError("tracked vertex index out of range");
        }
    }
    Prepared prep;
    auto& result = prep.result;
    if (config.horizon == 0.0) {
        result.grid = {0.0, 0};
    } else {
        const double step = config.record_step > 0.0 ? config.record_step : config.horizon / 2048.0;
        result.grid = TimeGrid::from_step(config.horizon, step);
    }
    result.theta = scaling_factor(config.scaling, n);
    result.tracked = config.tracked;
    result.trains.times.assign(n, {});
    if (kernel.is_exponential() && config.kernel_path == KernelPath::automatic) {
        prep.state = std::make_unique<ExponentialState>(net, kernel.rate(), result.theta);
    } else {
        prep.state = std::make_unique<HistoryState>(net, kernel, result.theta, config.history_tolerance);
    }
    prep.envelope = h.sup_norm();
    return prep;
}

// Acceptance probability of a candidate at vertex i; must lie in [0, 1].
double acceptance_ratio(const TransferFunction& h, double envelope, double input, SimulationDiagnostics& diag) {
    const double ratio = h(input) / envelope;
    if (!(ratio >= 0.0 && ratio <= 1.0 + 1e-12)) {
        throw ContractError("thinning envelope violated: h(x)/||h|| outside [0, 1]");
    }
    diag.max_acceptance_ratio = std::max(diag.max_acceptance_ratio, ratio);
    return ratio;
}

} // namespace

SimulationResult simulate_thinning(const NetworkConfiguration& net, const Kernel& kernel, const TransferFunction& h,
                                   const SimulationConfig& config) {
    auto prep = prepare(net, kernel, h, config);
    auto& result = prep.result;
    auto& state = *prep.state;
    auto& diag = result.diagnostics;
    const std::size_t n = net.size();
    Recorder recorder(result, n, config.record_full);

    const double total_rate = static_cast<double>(n) * prep.envelope;
    if (total_rate > 0.0) {
        RandomStream times(config.seed, StreamPurpose::candidate_times);
        RandomStream vertices(config.seed, StreamPurpose::vertex_assignment);
        RandomStream marks(config.seed, StreamPurpose::acceptance);
        double t = 0.0;
        for (;;) {
            double next = t + times.exponential(total_rate);
            if (next <= t) {
                next = std::nextafter(t, std::numeric_limits<double>::infinity());
                ++diag.tie_incidents;
            }
            if (next >= config.horizon) {
                break;
            }
            t = next;
            recorder.advance_to(t, state);
            const auto i = static_cast<std::size_t>(vertices.below(n));
            ++diag.candidates;
            const double ratio = acceptance_ratio(h, prep.envelope, state.value(i, t), diag);
            if (marks.uniform() < ratio) {
                result.trains.times[i].push_back(t);
                state.on_event(i, t);
                ++diag.accepted;
            }
        }
    }
    recorder.finish(state);
    return result;
}

SimulationResult simulate_time_change(const NetworkConfiguration& net, const Kernel& kernel,
                                      const TransferFunction& h, const SimulationConfig& config) {
    auto prep = prepare(net, kernel, h, config);
    auto& result = prep.result;
    auto& state = *prep.state;
    auto& diag = result.diagnostics;
    const std::size_t n = net.size();
    Recorder recorder(result, n, config.record_full);

    if (prep.envelope > 0.0 && config.horizon > 0.0) {
        std::vector<RandomStream> clocks;
        std::vector<RandomStream> marks;
        clocks.reserve(n);
        marks.reserve(n);
        using Tick = std::pair<double, std::size_t>;
        std::priority_queue<Tick, std::vector<Tick>, std::greater<>> queue;
        for (std::size_t i = 0; i < n; ++i) {
            clocks.emplace_back(config.seed, StreamPurpose::vertex_clock, static_cast<std::uint32_t>(i));
            marks.emplace_back(config.seed, StreamPurpose::vertex_marks, static_cast<std::uint32_t>(i));
            const double first = clocks[i].exponential(prep.envelope);
            if (first < config.horizon) {
                queue.emplace(first, i);
            }
        }
        double last = 0.0;
        while (!queue.empty()) {
            auto [t, i] = queue.top();
            queue.pop();
            // Each clock keeps its own undisturbed sequence; only the processed time moves.
            const double own = t;
            if (t <= last && diag.candidates > 0) {
                t = std::nextafter(last, std::numeric_limits<double>::infinity());
                ++diag.tie_incidents;
            }
            if (t >= config.horizon) {
                continue;
            }
            last = t;
            recorder.advance_to(t, state);
            ++diag.candidates;
            const double ratio = acceptance_ratio(h, prep.envelope, state.value(i, t), diag);
            if (marks[i].uniform() < ratio) {
                result.trains.times[i].push_back(t);
                state.on_event(i, t);
                ++diag.accepted;
            }
            const double next = own + clocks[i].exponential(prep.envelope);
            if (next < config.horizon) {
                queue.emplace(next, i);
            }
        }
    }
    recorder.finish(state);
    return result;
}

SimulationResult simulate(const NetworkConfiguration& net, const Kernel& kernel, const TransferFunction& h,
                          const SimulationConfig& config, Backend backend) {
    return backend == Backend::time_change ? simulate_time_change(net, kernel, h, config)
                                           : simulate_thinning(net, kernel, h, config);
}

MartingalePaths extract_martingale_paths(const SimulationResult& run, const NetworkConfiguration& net,
                                         const TransferFunction& h, std::span<const std::size_t> vertices) {
    if (!run.has_full_paths()) {
        throw StateError("martingale extraction needs every vertex's intensity path; re-run with record_full=true");
    }
    const std::size_t n = net.size();
    if (run.final_intensity.size() != n) {
        throw ContractError("simulation result does not belong to this network");
    }
    for (auto v : vertices) {
        if (v >= n) {
            throw ParameterError("tracked vertex index out of range");
        }
    }
    const auto dn = static_cast<double>(n);
    const double root_n = std::sqrt(dn);
    const double q = net.q();
    const double dt = run.grid.step();
    const std::size_t points = run.grid.points();
    const std::size_t tracked = vertices.size();

    MartingalePaths out;
    out.grid = run.grid;
    out.vertices.assign(vertices.begin(), vertices.end());
    out.total.assign(points, 0.0);
    out.common.assign(points, 0.0);
    out.mean_compensated.assign(points, 0.0);
    out.mean_rate.assign(points, 0.0);
    out.mean_rate_integral.assign(points, 0.0);
    out.idiosyncratic.assign(tracked, std::vector<double>(points, 0.0));
    out.vertex.assign(tracked, std::vector<double>(points, 0.0));
    out.drift.assign(tracked, std::vector<double>(points, 0.0));

    // (V_jk - q) per tracked k, and pair weights (V_jk - q)(V_jl - q).
    std::vector<std::vector<double>> centered(tracked, std::vector<double>(n));
    for (std::size_t k = 0; k < tracked; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            centered[k][j] = (net.edge(j, vertices[k]) ? 1.0 : 0.0) - q;
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < tracked; ++k) {
        for (std::size_t l = k; l < tracked; ++l) {
            pairs.emplace_back(k, l);
            CovariationSeries series;
            series.k = vertices[k];
            series.l = vertices[l];
            series.predictable.assign(points, 0.0);
            series.mean_rate.assign(points, 0.0);
            series.limit.assign(points, 0.0);
            series.realized.assign(points, 0.0);
            out.covariations.push_back(std::move(series));
        }
    }
    std::vector<double> pair_weight_sum(pairs.size(), 0.0);
    for (std::size_t c = 0; c < pairs.size(); ++c) {
        for (std::size_t j = 0; j < n; ++j) {
            pair_weight_sum[c] += centered[pairs[c].first][j] * centered[pairs[c].second][j];
        }
    }

    std::vector<double> rate_prev(n), compensator(n, 0.0);
    std::vector<std::size_t> cursor(n, 0);
    for (std::size_t m = 0; m < points; ++m) {
        const double tm = run.grid.time(m);
        double rate_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double rate = h(run.full(m, j));
            if (m > 0) {
                compensator[j] += 0.5 * dt * (rate_prev[j] + rate);
            }
            rate_prev[j] = rate;
            rate_sum += rate;
            const auto& train = run.trains.times[j];
            while (cursor[j] < train.size() && train[cursor[j]] < tm) {
                ++cursor[j];
            }
        }
        out.mean_rate[m] = rate_sum / dn;
        if (m > 0) {
            out.mean_rate_integral[m] = out.mean_rate_integral[m - 1] + 0.5 * dt * (out.mean_rate[m - 1] + out.mean_rate[m]);
        }

        double total = 0.0, common = 0.0;
        std::vector<double> idio(tracked, 0.0), drift(tracked, 0.0);
        std::vector<double> predictable(pairs.size(), 0.0), realized(pairs.size(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double count = static_cast<double>(cursor[j]);
            const double compensated = count - compensator[j];
            const double u = net.sign(j);
            total += compensated;
            common += u * compensated;
            for (std::size_t k = 0; k < tracked; ++k) {
                idio[k] += u * centered[k][j] * compensated;
                if (net.edge(j, vertices[k])) {
                    drift[k] += u * compensator[j];
                }
            }
            for (std::size_t c = 0; c < pairs.size(); ++c) {
                const double w = centered[pairs[c].first][j] * centered[pairs[c].second][j];
                predictable[c] += w * compensator[j];
                realized[c] += w * count;
            }
        }
        out.total[m] = total / root_n;
        out.common[m] = common / root_n;
        out.mean_compensated[m] = total / dn;
        for (std::size_t k = 0; k < tracked; ++k) {
            out.idiosyncratic[k][m] = idio[k] / root_n;
            out.vertex[k][m] = out.idiosyncratic[k][m] + q * out.common[m];
            out.drift[k][m] = run.theta * drift[k];
        }
        for (std::size_t c = 0; c < pairs.size(); ++c) {
            auto& series = out.covariations[c];
            series.predictable[m] = predictable[c] / dn;
            series.realized[m] = realized[c] / dn;
            series.mean_rate[m] = pair_weight_sum[c] / dn * out.mean_rate_integral[m];
            series.limit[m] = pairs[c].first == pairs[c].second ? q * (1.0 - q) * out.mean_rate_integral[m] : 0.0;
        }
    }
    return out;
}

} // namespace hawkes_mf
