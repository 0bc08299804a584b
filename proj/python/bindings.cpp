#include "cli.hpp"

#include "hawkes_mf/analysis.hpp"
#include "hawkes_mf/config.hpp"
#include "hawkes_mf/errors.hpp"
#include "hawkes_mf/fluctuations.hpp"
#include "hawkes_mf/kernels.hpp"
#include "hawkes_mf/network.hpp"
#include "hawkes_mf/parallel.hpp"
#include "hawkes_mf/simulator.hpp"
#include "hawkes_mf/volterra.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace hawkes_mf;

namespace {

py::dict path_dict(const IntensityPath& path) {
    std::vector<double> t(path.grid.points());
    for (std::size_t m = 0; m < t.size(); ++m) {
        t[m] = path.grid.time(m);
    }
    py::dict d;
    d["t"] = t;
    d["values"] = path.values;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hawkes processes on Erdos-Renyi graphs: simulation, mean-field limits, verification";
    m.attr("__version__") = HAWKES_MF_VERSION;

    py::register_exception<ParameterError>(m, "ParameterError", PyExc_ValueError);
    py::register_exception<RegimeError>(m, "RegimeError", PyExc_ValueError);
    py::register_exception<CapabilityError>(m, "CapabilityError", PyExc_ValueError);
    py::register_exception<SchemeMismatchError>(m, "SchemeMismatchError", PyExc_ValueError);
    py::register_exception<StepSizeError>(m, "StepSizeError", PyExc_ValueError);
    py::register_exception<StateError>(m, "StateError", PyExc_RuntimeError);
    py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<Kernel>(m, "Kernel")
        .def_static("exponential", &Kernel::exponential, py::arg("rate"))
        .def_static("tabulated", &Kernel::tabulated, py::arg("step"), py::arg("values"), py::arg("derivatives"))
        .def("__call__", &Kernel::operator(), py::arg("t"))
        .def("derivative", &Kernel::derivative, py::arg("t"))
        .def_property_readonly("sup_norm", &Kernel::sup_norm)
        .def_property_readonly("derivative_sup_norm", &Kernel::derivative_sup_norm)
        .def_property_readonly("id", &Kernel::id);

    py::class_<TransferFunction>(m, "TransferFunction")
        .def_static("arctan", &TransferFunction::arctan)
        .def_static("constant", &TransferFunction::constant, py::arg("value"))
        .def_static("tabulated", &TransferFunction::tabulated, py::arg("x_min"), py::arg("step"), py::arg("values"))
        .def_static("rectified_linear", &TransferFunction::rectified_linear, py::arg("base"), py::arg("slope"))
        .def("__call__", &TransferFunction::operator(), py::arg("x"))
        .def("derivative", &TransferFunction::derivative, py::arg("x"))
        .def_property_readonly("sup_norm", &TransferFunction::sup_norm)
        .def_property_readonly("lipschitz", &TransferFunction::lipschitz)
        .def_property_readonly("id", &TransferFunction::id);

    py::class_<NetworkConfiguration>(m, "Network")
        .def_property_readonly("n", &NetworkConfiguration::size)
        .def_property_readonly("p", &NetworkConfiguration::p)
        .def_property_readonly("q", &NetworkConfiguration::q)
        .def_property_readonly("seed", &NetworkConfiguration::seed)
        .def_property_readonly("edge_count", &NetworkConfiguration::edge_count)
        .def("edge", &NetworkConfiguration::edge, py::arg("source"), py::arg("target"))
        .def("sign", &NetworkConfiguration::sign, py::arg("vertex"))
        .def("signs", [](const NetworkConfiguration& n) {
            return std::vector<int>(n.signs().begin(), n.signs().end());
        })
        .def("__eq__", [](const NetworkConfiguration& a, const NetworkConfiguration& b) { return a == b; });

    m.def("sample_network", &sample_network, py::arg("n"), py::arg("p"), py::arg("q"), py::arg("seed"));
    m.def("build_complementary_network", &build_complementary_network, py::arg("n"), py::arg("seed"));
    m.def(
        "weight_statistics",
        [](const NetworkConfiguration& net) {
            const auto w = compute_weight_statistics(net);
            py::dict d;
            d["row_mean_V"] = w.row_mean_V;
            d["mean_UV_per_target"] = w.mean_UV_per_target;
            d["W_N"] = w.W_N;
            d["W_tilde"] = w.W_tilde;
            d["W_N_i"] = w.W_N_i;
            d["mean_square_W"] = w.mean_square_W;
            return d;
        },
        py::arg("network"));

    m.def(
        "solve_mean_field",
        [](const Kernel& k, const TransferFunction& h, double p, double q, double horizon, double step,
           const std::string& scheme) {
            const auto s = scheme == "ode_rk4" ? MeanFieldScheme::ode_rk4 : MeanFieldScheme::volterra_trapezoid;
            if (scheme != "ode_rk4" && scheme != "volterra_trapezoid") {
                throw ParameterError("scheme must be volterra_trapezoid or ode_rk4");
            }
            return path_dict(solve_mean_field(k, h, p, q, horizon, step, s));
        },
        py::arg("kernel"), py::arg("transfer"), py::arg("p"), py::arg("q"), py::arg("horizon"), py::arg("step"),
        py::arg("scheme") = "volterra_trapezoid");

    m.def(
        "fixed_point",
        [](const Kernel& k, const TransferFunction& h, double p, double q) {
            const auto r = fixed_point(k, h, p, q);
            py::dict d;
            d["roots"] = r.roots;
            d["uniqueness_guaranteed"] = r.uniqueness_guaranteed;
            d["warning"] = r.warning;
            return d;
        },
        py::arg("kernel"), py::arg("transfer"), py::arg("p"), py::arg("q"));

    m.def(
        "simulate",
        [](const NetworkConfiguration& net, const Kernel& k, const TransferFunction& h, double horizon,
           const std::string& scaling, std::uint64_t seed, std::vector<std::size_t> tracked, double record_step,
           const std::string& backend) {
            SimulationConfig c;
            c.horizon = horizon;
            c.scaling = parse_scaling(scaling);
            c.seed = seed;
            c.tracked = std::move(tracked);
            c.record_step = record_step;
            SimulationResult run;
            {
                py::gil_scoped_release release;
                run = simulate(net, k, h, c, parse_backend(backend));
            }
            std::vector<double> t(run.grid.points());
            for (std::size_t i = 0; i < t.size(); ++i) {
                t[i] = run.grid.time(i);
            }
            py::dict d;
            d["times"] = run.trains.times;
            d["grid"] = t;
            d["tracked"] = run.tracked;
            d["tracked_paths"] = run.tracked_paths;
            d["final_intensity"] = run.final_intensity;
            d["theta"] = run.theta;
            d["candidates"] = run.diagnostics.candidates;
            d["accepted"] = run.diagnostics.accepted;
            return d;
        },
        py::arg("network"), py::arg("kernel"), py::arg("transfer"), py::arg("horizon"),
        py::arg("scaling") = "mean_field", py::arg("seed") = 0, py::arg("tracked") = std::vector<std::size_t>{},
        py::arg("record_step") = 0.0, py::arg("backend") = "thinning");

    m.def(
        "simulate_fluctuations",
        [](const Kernel& k, const TransferFunction& h, double p, double q, double horizon, double step, std::size_t n,
           std::uint64_t seed) {
            const auto I = solve_mean_field(k, h, p, q, horizon, step, MeanFieldScheme::volterra_trapezoid);
            const auto s = simulate_fluctuations(I, k, h, p, q, n, seed);
            py::dict d;
            d["I"] = path_dict(I);
            d["Kbar"] = s.Kbar;
            d["K"] = s.K;
            d["W"] = s.W;
            d["W_tilde"] = s.W_tilde;
            return d;
        },
        py::arg("kernel"), py::arg("transfer"), py::arg("p"), py::arg("q"), py::arg("horizon"), py::arg("step"),
        py::arg("n"), py::arg("seed"));

    m.def("experiment_names", &experiment_names);
    m.def(
        "_verify_json",
        [](const std::string& config_json, const std::string& experiment, std::size_t jobs) {
            const auto config = parse_config(nlohmann::json::parse(config_json, nullptr, true, true));
            const std::string name = experiment.empty() ? config.experiment : experiment;
            check_regime(config, name);
            std::string out;
            {
                py::gil_scoped_release release;
                out = report_to_json(run_experiment(name, to_settings(config, jobs == 0 ? default_jobs() : jobs),
                                                    config.tolerances))
                          .dump();
            }
            return out;
        },
        py::arg("config_json"), py::arg("experiment") = "", py::arg("jobs") = 1);
    m.def(
        "main", [](const std::vector<std::string>& args) { return cli::run(args); }, py::arg("args"),
        "Run the command-line interface with the given arguments; returns the exit code.");
}
