#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qsim/commands.hpp"
#include "qsim/config.hpp"
#include "qsim/errors.hpp"
#include "qsim/scenarios.hpp"

namespace py = pybind11;
using namespace qsim;

namespace {

RunSpec parse(const std::string& config_json) { return parse_config_text(config_json); }

py::dict summary_dict(const EpidemicSummary& s) {
    py::dict d;
    d["observable"] = s.observable_name;
    d["peak_value"] = s.peak_value;
    d["peak_time"] = s.peak_time;
    d["end_time"] = s.end_time;
    d["quarantine_integral"] = s.quarantine_integral;
    d["degenerate"] = s.degenerate;
    return d;
}

py::dict match_dict(const MatchResult& m) {
    py::dict d;
    d["parameter"] = m.parameter;
    d["value"] = m.value;
    d["achieved_peak"] = m.achieved_peak;
    d["target_peak"] = m.target_peak;
    d["iterations"] = m.iterations;
    return d;
}

py::dict py_simulate(const std::string& config_json) {
    const RunSpec spec = parse(config_json);
    const ScenarioResult r = run_scenario(spec.scenario);
    const auto& traj = r.trajectory;
    const std::size_t n = traj.size();
    const std::size_t dim = traj.dimension();

    py::array_t<double> t(static_cast<py::ssize_t>(n));
    py::array_t<double> x({static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(dim)});
    auto tv = t.mutable_unchecked<1>();
    auto xv = x.mutable_unchecked<2>();
    for (std::size_t j = 0; j < n; ++j) {
        tv(j) = traj.time(j);
        const auto s = traj.state(j);
        for (std::size_t i = 0; i < dim; ++i) xv(j, i) = s[i];
    }
    py::dict obs;
    const ModelKind model = spec.scenario.model_kind();
    for (auto kind : spec.observables) {
        const Observable o = Observable::of(model, kind);
        py::array_t<double> y(static_cast<py::ssize_t>(n));
        auto yv = y.mutable_unchecked<1>();
        for (std::size_t j = 0; j < n; ++j) yv(j) = o(traj.state(j));
        obs[py::str(std::string(to_string(kind)))] = y;
    }
    py::dict out;
    out["model"] = std::string(to_string(model));
    out["t"] = t;
    out["state"] = x;
    out["observables"] = obs;
    out["summary"] = summary_dict(r.summary);
    return out;
}

double peak(const std::string& config_json, const std::string& observable) {
    return evaluate_peak(parse(config_json).scenario, observable_kind_from_string(observable)).value;
}

py::dict match_peak(const std::string& config_json, const std::string& strategy, double psi) {
    const RunSpec spec = parse(config_json);
    const double target = evaluate_peak(testing_scenario(spec.scenario, psi), spec.match_observable).value;
    const ScenarioConfig base = untreated_scenario(spec.scenario);
    const MatchResult m = quarantine_strategy_from_string(strategy) == QuarantineStrategy::abrupt
                              ? match_abrupt_quarantine(target, base, spec.match_observable)
                              : match_gradual_quarantine(target, base, spec.match_observable);
    return match_dict(m);
}

py::dict cost_ratio(const std::string& config_json, double psi, const std::string& strategy) {
    const RunSpec spec = parse(config_json);
    const CostRatio c =
        quarantine_cost_ratio(psi, spec.scenario, quarantine_strategy_from_string(strategy), spec.match_observable);
    py::dict d;
    d["psi"] = c.psi;
    d["strategy"] = std::string(to_string(c.strategy));
    d["match"] = match_dict(c.match);
    d["testing_end"] = c.testing_end;
    d["testing_integral"] = c.testing_integral;
    d["indiscriminate_end"] = c.indiscriminate_end;
    d["indiscriminate_integral"] = c.indiscriminate_integral;
    d["ratio"] = c.ratio;
    return d;
}

py::dict py_sweep(const std::string& config_json, unsigned threads) {
    const RunSpec spec = parse(config_json);
    if (!spec.sweep) throw ConfigError("config has no \"sweep\" section");
    SweepOptions options;
    options.threads = threads;
    const ObservableKind kinds[] = {spec.sweep->observable};
    const SweepGrid g = qsim::sweep(spec.scenario, spec.sweep->axis1, spec.sweep->axis2, kinds, options).front();
    py::array_t<double> values({static_cast<py::ssize_t>(g.rows()), static_cast<py::ssize_t>(g.cols())});
    auto v = values.mutable_unchecked<2>();
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (std::size_t j = 0; j < g.cols(); ++j) v(i, j) = g.at(i, j);
    }
    py::dict d;
    d["observable"] = g.observable;
    d["axis1"] = py::make_tuple(g.axis1.path, g.axis1.values);
    d["axis2"] = g.axis2 ? py::object(py::make_tuple(g.axis2->path, g.axis2->values)) : py::none();
    d["values"] = values;
    d["errors"] = g.errors;
    return d;
}

py::list figure(const std::string& id, const std::filesystem::path& out_dir) {
    const RunManifest m = run_figure(id, out_dir);
    py::list files;
    for (const auto& f : m.emitted_files) files.append(f.path);
    return files;
}

}  // namespace

PYBIND11_MODULE(_qsim, m) {
    m.doc() = "Compartmental epidemic simulator with testing and quarantine";

    static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
    static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_RuntimeError);
    static py::exception<IoError> io(m, "IoError", PyExc_OSError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const ValidationError& e) {
            py::set_error(validation, e.what());
        } catch (const NumericalError& e) {
            py::set_error(numerical, e.what());
        } catch (const IoError& e) {
            py::set_error(io, e.what());
        }
    });

    m.def("normalize_config", [](const std::string& c) { return to_json(parse(c)).dump(); }, py::arg("config_json"),
          "Fully explicit form of a JSON configuration.");
    m.def("simulate", &py_simulate, py::arg("config_json"),
          "Integrate a scenario; returns times, states, observables and the epidemic summary.");
    m.def("peak", &peak, py::arg("config_json"), py::arg("observable") = "total_infected");
    m.def("match_peak", &match_peak, py::arg("config_json"), py::arg("strategy"), py::arg("psi"),
          "Match an indiscriminate quarantine to the peak of the testing scenario with rate psi.");
    m.def("cost_ratio", &cost_ratio, py::arg("config_json"), py::arg("psi"), py::arg("strategy") = "abrupt");
    m.def("sweep", &py_sweep, py::arg("config_json"), py::arg("threads") = 0u);
    m.def("figure_ids", &figure_ids);
    m.def("figure", &figure, py::arg("id"), py::arg("out_dir"),
          "Write one figure's CSV/SVG panels; returns the emitted paths.");
}
