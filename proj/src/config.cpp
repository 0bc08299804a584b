#include "hawkes_mf/config.hpp"

#include "hawkes_mf/errors.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace hawkes_mf {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) {
        throw ConfigError(path, "expected an object");
    }
    const std::set<std::string> keys(allowed.begin(), allowed.end());
    for (const auto& [key, value] : obj.items()) {
        if (!keys.count(key)) {
            throw ConfigError(join(path, key), "unknown key");
        }
    }
}

double number(const json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(join(path, key), "expected a number");
    }
    return v.get<double>();
}

std::uint64_t unsigned_int(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
}

std::uint64_t unsigned_int(const json& obj, const std::string& path, const char* key, std::uint64_t fallback) {
    return obj.contains(key) ? unsigned_int(obj.at(key), join(path, key)) : fallback;
}

bool boolean(const json& obj, const std::string& path, const char* key, bool fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_boolean()) {
        throw ConfigError(join(path, key), "expected true or false");
    }
    return obj.at(key).get<bool>();
}

std::string text(const json& obj, const std::string& path, const char* key, const std::string& fallback) {
    if (!obj.contains(key)) {
        return fallback;
    }
    if (!obj.at(key).is_string()) {
        throw ConfigError(join(path, key), "expected a string");
    }
    return obj.at(key).get<std::string>();
}

const json& single_entry(const json& spec, const std::string& path, std::string& kind) {
    if (!spec.is_object() || spec.size() != 1) {
        throw ConfigError(path, "expected an object with exactly one kind, e.g. {\"exponential\": {...}}");
    }
    kind = spec.begin().key();
    return spec.begin().value();
}

std::vector<double> numbers(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key) || !obj.at(key).is_array()) {
        throw ConfigError(join(path, key), "expected an array of numbers");
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < obj.at(key).size(); ++i) {
        const auto& v = obj.at(key)[i];
        if (!v.is_number()) {
            throw ConfigError(join(path, key) + "[" + std::to_string(i) + "]", "expected a number");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

template <typename Fn>
auto wrap(const std::string& path, Fn fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(path, e.what());
    } catch (const std::domain_error& e) {
        throw ConfigError(path, e.what());
    }
}

} // namespace

Kernel kernel_from_json(const json& spec, const std::string& path) {
    std::string kind;
    const auto& body = single_entry(spec, path, kind);
    const std::string at = join(path, kind);
    if (kind == "exponential") {
        only_keys(body, at, {"lambda"});
        const double lambda = number(body, at, "lambda", 1.0);
        return wrap(join(at, "lambda"), [&] { return Kernel::exponential(lambda); });
    }
    if (kind == "tabulated") {
        only_keys(body, at, {"step", "values", "derivatives"});
        const double step = number(body, at, "step", 0.0);
        auto values = numbers(body, at, "values");
        auto derivs = numbers(body, at, "derivatives");
        return wrap(at, [&] { return Kernel::tabulated(step, values, derivs); });
    }
    throw ConfigError(join(path, kind), "unknown kernel kind (expected exponential or tabulated)");
}

TransferFunction transfer_from_json(const json& spec, const std::string& path) {
    std::string kind;
    const auto& body = single_entry(spec, path, kind);
    const std::string at = join(path, kind);
    if (kind == "arctan") {
        only_keys(body, at, {});
        return TransferFunction::arctan();
    }
    if (kind == "constant") {
        only_keys(body, at, {"value"});
        const double value = number(body, at, "value", 1.0);
        return wrap(join(at, "value"), [&] { return TransferFunction::constant(value); });
    }
    if (kind == "tabulated") {
        only_keys(body, at, {"x_min", "step", "values"});
        const double x_min = number(body, at, "x_min", 0.0);
        const double step = number(body, at, "step", 0.0);
        auto values = numbers(body, at, "values");
        return wrap(at, [&] { return TransferFunction::tabulated(x_min, step, values); });
    }
    if (kind == "rectified_linear") {
        only_keys(body, at, {"base", "slope"});
        const double base = number(body, at, "base", 1.0);
        const double slope = number(body, at, "slope", 1.0);
        return wrap(at, [&] { return TransferFunction::rectified_linear(base, slope); });
    }
    throw ConfigError(join(path, kind), "unknown transfer kind (expected arctan, constant, tabulated, rectified_linear)");
}

ExperimentConfig parse_config(const json& input) {
    const json* doc = &input;
    if (input.is_object() && input.contains("config") && input.contains("schema_version")) {
        doc = &input.at("config");
    }
    only_keys(*doc, "", {"model", "run", "experiment", "output", "tolerances"});
    ExperimentConfig c;

    const json model = doc->value("model", json::object());
    only_keys(model, "model", {"n", "sizes", "p", "q", "kernel", "transfer", "scaling", "network", "network_seed"});
    if (model.contains("n") && model.contains("sizes")) {
        throw ConfigError("model.sizes", "give either n or sizes, not both");
    }
    if (model.contains("n")) {
        c.model.sizes = {static_cast<std::size_t>(unsigned_int(model.at("n"), "model.n"))};
    } else if (model.contains("sizes")) {
        const auto& sizes = model.at("sizes");
        if (!sizes.is_array() || sizes.empty()) {
            throw ConfigError("model.sizes", "expected a non-empty array of vertex counts");
        }
        c.model.sizes.clear();
        for (std::size_t i = 0; i < sizes.size(); ++i) {
            c.model.sizes.push_back(unsigned_int(sizes[i], "model.sizes[" + std::to_string(i) + "]"));
        }
    }
    for (auto n : c.model.sizes) {
        if (n == 0) {
            throw ConfigError("model.sizes", "vertex counts must be positive");
        }
    }
    c.model.p = number(model, "model", "p", 0.5);
    c.model.q = number(model, "model", "q", 0.5);
    if (!(c.model.p >= 0.0 && c.model.p <= 1.0)) {
        throw ConfigError("model.p", "must lie in [0, 1]");
    }
    if (!(c.model.q >= 0.0 && c.model.q <= 1.0)) {
        throw ConfigError("model.q", "must lie in [0, 1]");
    }
    if (model.contains("kernel")) {
        c.model.kernel_spec = model.at("kernel");
    }
    if (model.contains("transfer")) {
        c.model.transfer_spec = model.at("transfer");
    }
    (void)kernel_from_json(c.model.kernel_spec, "model.kernel");
    (void)transfer_from_json(c.model.transfer_spec, "model.transfer");
    const bool balanced = c.model.p == 0.5;
    const std::string scaling = text(model, "model", "scaling", balanced ? "critical" : "mean_field");
    c.model.scaling = wrap("model.scaling", [&] { return parse_scaling(scaling); });
    if ((c.model.scaling == Scaling::critical) != balanced) {
        throw ConfigError("model.scaling", "regime mismatch: critical scaling requires p = 0.5 and p = 0.5 requires "
                                           "critical scaling");
    }
    const std::string network = text(model, "model", "network", "erdos_renyi");
    if (network == "erdos_renyi") {
        c.model.network = NetworkKind::erdos_renyi;
    } else if (network == "complementary") {
        c.model.network = NetworkKind::complementary;
    } else {
        throw ConfigError("model.network", "expected erdos_renyi or complementary");
    }
    if (model.contains("network_seed")) {
        c.model.network_seed = unsigned_int(model.at("network_seed"), "model.network_seed");
    }

    const json run = doc->value("run", json::object());
    only_keys(run, "run",
              {"horizon", "step", "replicates", "tracked", "master_seed", "seeds", "backend", "limit_samples",
               "samples", "paths", "complementary", "complementary_seed"});
    c.run.horizon = number(run, "run", "horizon", balanced ? 10.0 : 5.0);
    if (!(c.run.horizon >= 0.0) || !std::isfinite(c.run.horizon)) {
        throw ConfigError("run.horizon", "must be finite and >= 0");
    }
    c.run.step = number(run, "run", "step", 0.0);
    if (c.run.step < 0.0) {
        throw ConfigError("run.step", "must be >= 0 (0 selects horizon / 2048)");
    }
    if (c.run.horizon > 0.0) {
        (void)wrap("run.step", [&] { return TimeGrid::from_step(c.run.horizon, c.resolved_step()); });
    }
    c.run.replicates = unsigned_int(run, "run", "replicates", 20);
    if (run.contains("tracked")) {
        const auto& t = run.at("tracked");
        c.run.tracked.clear();
        if (t.is_number_integer()) {
            const auto count = unsigned_int(t, "run.tracked");
            for (std::size_t k = 0; k < count; ++k) {
                c.run.tracked.push_back(k);
            }
        } else if (t.is_array()) {
            for (std::size_t i = 0; i < t.size(); ++i) {
                c.run.tracked.push_back(unsigned_int(t[i], "run.tracked[" + std::to_string(i) + "]"));
            }
        } else {
            throw ConfigError("run.tracked", "expected a vertex count or a list of vertex indices");
        }
    }
    for (auto v : c.run.tracked) {
        for (auto n : c.model.sizes) {
            if (v >= n) {
                throw ConfigError("run.tracked", "vertex index " + std::to_string(v) + " out of range for N = " +
                                                     std::to_string(n));
            }
        }
    }
    c.run.master_seed = unsigned_int(run, "run", "master_seed", 1);
    if (run.contains("seeds")) {
        const auto& s = run.at("seeds");
        if (!s.is_array()) {
            throw ConfigError("run.seeds", "expected an array of seeds");
        }
        for (std::size_t i = 0; i < s.size(); ++i) {
            c.run.seeds.push_back(unsigned_int(s[i], "run.seeds[" + std::to_string(i) + "]"));
        }
    }
    const std::string backend = text(run, "run", "backend", "thinning");
    c.run.backend = wrap("run.backend", [&] { return parse_backend(backend); });
    c.run.limit_samples = unsigned_int(run, "run", "limit_samples", 10000);
    c.run.samples = unsigned_int(run, "run", "samples", 1000);
    c.run.paths = unsigned_int(run, "run", "paths", 1000);
    c.run.complementary = boolean(run, "run", "complementary", true);
    c.run.complementary_seed = unsigned_int(run, "run", "complementary_seed", 7);

    c.experiment = text(*doc, "", "experiment", "");
    if (!c.experiment.empty()) {
        const auto names = experiment_names();
        if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
            throw ConfigError("experiment", "unknown experiment '" + c.experiment + "'");
        }
    }

    const json output = doc->value("output", json::object());
    only_keys(output, "output", {"dir", "events_format", "path_files"});
    c.output.dir = text(output, "output", "dir", "");
    c.output.events_format = text(output, "output", "events_format", "jsonl");
    if (c.output.events_format != "jsonl" && c.output.events_format != "csv") {
        throw ConfigError("output.events_format", "expected jsonl or csv");
    }
    c.output.path_files = unsigned_int(output, "output", "path_files", 8);

    const json tol = doc->value("tolerances", json::object());
    only_keys(tol, "tolerances",
              {"mean_se", "covariance_pooled_se", "critical_slope_relative", "lln_ratio_low", "lln_ratio_high",
               "alpha", "min_replicates", "linearization_relative"});
    auto& t = c.tolerances;
    t.mean_se = number(tol, "tolerances", "mean_se", t.mean_se);
    t.covariance_pooled_se = number(tol, "tolerances", "covariance_pooled_se", t.covariance_pooled_se);
    t.critical_slope_relative = number(tol, "tolerances", "critical_slope_relative", t.critical_slope_relative);
    t.lln_ratio_low = number(tol, "tolerances", "lln_ratio_low", t.lln_ratio_low);
    t.lln_ratio_high = number(tol, "tolerances", "lln_ratio_high", t.lln_ratio_high);
    t.alpha = number(tol, "tolerances", "alpha", t.alpha);
    t.min_replicates = unsigned_int(tol, "tolerances", "min_replicates", t.min_replicates);
    t.linearization_relative = number(tol, "tolerances", "linearization_relative", t.linearization_relative);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw ConfigError(file.string(), "cannot open config file");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buffer.str(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(file.string(), std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

json resolved_json(const ExperimentConfig& c) {
    json model{{"sizes", c.model.sizes},
               {"p", c.model.p},
               {"q", c.model.q},
               {"kernel", c.model.kernel_spec},
               {"transfer", c.model.transfer_spec},
               {"scaling", to_string(c.model.scaling)},
               {"network", c.model.network == NetworkKind::complementary ? "complementary" : "erdos_renyi"}};
    if (c.model.network_seed) {
        model["network_seed"] = *c.model.network_seed;
    }
    json run{{"horizon", c.run.horizon},
             {"step", c.resolved_step()},
             {"replicates", c.run.replicates},
             {"tracked", c.run.tracked},
             {"master_seed", c.run.master_seed},
             {"backend", to_string(c.run.backend)},
             {"limit_samples", c.run.limit_samples},
             {"samples", c.run.samples},
             {"paths", c.run.paths},
             {"complementary", c.run.complementary},
             {"complementary_seed", c.run.complementary_seed}};
    if (!c.run.seeds.empty()) {
        run["seeds"] = c.run.seeds;
    }
    json doc{{"model", model},
             {"run", run},
             {"output", {{"dir", c.output.dir}, {"events_format", c.output.events_format},
                         {"path_files", c.output.path_files}}},
             {"tolerances", to_json(c.tolerances)}};
    if (!c.experiment.empty()) {
        doc["experiment"] = c.experiment;
    }
    return doc;
}

void check_regime(const ExperimentConfig& config, const std::string& experiment) {
    const bool balanced = config.model.p == 0.5;
    if (experiment == "critical" && !balanced) {
        throw ConfigError("model.p", "regime mismatch: the critical experiment needs p = 0.5");
    }
    if ((experiment == "lln" || experiment == "clt" || experiment == "corollary" || experiment == "independence") &&
        balanced) {
        throw ConfigError("model.p", "regime mismatch: " + experiment +
                                         " needs p != 0.5; use the critical experiment for balanced networks");
    }
}

ExperimentSettings to_settings(const ExperimentConfig& c, std::size_t jobs) {
    ExperimentSettings s;
    s.p = c.model.p;
    s.q = c.model.q;
    s.kernel = kernel_from_json(c.model.kernel_spec);
    s.transfer = transfer_from_json(c.model.transfer_spec);
    s.horizon = c.run.horizon;
    s.step = c.resolved_step();
    s.replicates = c.run.replicates;
    s.master_seed = c.run.master_seed;
    s.jobs = jobs;
    s.backend = c.run.backend;
    s.sizes = c.model.sizes;
    s.tracked = c.run.tracked.size();
    s.limit_samples = c.run.limit_samples;
    s.complementary = c.run.complementary;
    s.complementary_seed = c.run.complementary_seed;
    s.paths = c.run.paths;
    return s;
}

} // namespace hawkes_mf
