#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "spatial_sir/calibration.hpp"
#include "spatial_sir/output.hpp"

namespace py = pybind11;
using namespace spatial_sir;

namespace {

py::dict trace_dict(const RunTrace& t) {
    std::vector<int> day;
    std::vector<Count> s, i, r, new_inf;
    std::vector<double> contacts, iso, locked;
    for (const auto& d : t.days) {
        day.push_back(d.day);
        s.push_back(d.s);
        i.push_back(d.i);
        r.push_back(d.r);
        new_inf.push_back(d.new_infections);
        contacts.push_back(d.avg_contacts);
        iso.push_back(d.isolation_share);
        locked.push_back(d.locked_share);
    }
    py::dict out;
    out["scenario_id"] = t.scenario_id;
    out["seed"] = t.seed;
    out["n"] = t.n;
    out["day"] = day;
    out["s"] = s;
    out["i"] = i;
    out["r"] = r;
    out["new_infections"] = new_inf;
    out["avg_contacts"] = contacts;
    out["isolation_share"] = iso;
    out["locked_share"] = locked;
    out["final_size"] = t.final_size;
    out["peak_i_frac"] = t.peak_i_frac;
    out["peak_day"] = t.peak_day;
    out["r0_hat"] = t.r0_hat;
    out["converged"] = t.converged;
    return out;
}

ScenarioSpec spec_from(const std::string& config, const std::map<std::string, std::string>& overrides) {
    auto spec = parse_scenario(config);
    for (const auto& [k, v] : overrides) set_scenario_value(spec, k, v);
    validate_scenario(spec);
    return spec;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Spatial and mean-field SIR simulation";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

    m.def("final_size", &final_size, py::arg("r0"));
    m.def("peak_fraction", &peak_fraction, py::arg("r0"));
    m.def("rho_from_growth", &rho_from_growth, py::arg("r0"), py::arg("g0"));
    m.def("radius_for_contacts", &radius_for_contacts, py::arg("contacts"), py::arg("density"),
          py::arg("city_side") = 1.0);
    m.def(
        "alpha_response",
        [](double i_frac, double phi, double i_bar) { return alpha_response(i_frac, BehavioralParams{phi, i_bar}); },
        py::arg("i_frac"), py::arg("phi") = 0.88, py::arg("i_bar") = 0.01);

    m.def(
        "simulate_sir",
        [](double beta, double rho, double n, double i0, int horizon) {
            std::vector<double> s, i, r;
            for (const auto& st : simulate_sir(SirParams::linear(beta, rho, n), i0, horizon)) {
                s.push_back(st.s);
                i.push_back(st.i);
                r.push_back(st.r);
            }
            py::dict out;
            out["s"] = s;
            out["i"] = i;
            out["r"] = r;
            return out;
        },
        py::arg("beta"), py::arg("rho"), py::arg("n"), py::arg("i0"), py::arg("horizon"));

    m.def(
        "default_config", [] { return serialize_scenario(ScenarioSpec{}); },
        "Canonical text of the baseline scenario.");
    m.def(
        "normalize_config",
        [](const std::string& config, const std::map<std::string, std::string>& overrides) {
            return serialize_scenario(spec_from(config, overrides));
        },
        py::arg("config") = "", py::arg("overrides") = std::map<std::string, std::string>{});

    m.def(
        "run",
        [](const std::string& config, std::uint64_t seed, const std::map<std::string, std::string>& overrides,
           bool diagnostics) {
            const auto spec = spec_from(config, overrides);
            RunOptions o;
            o.diagnostics = diagnostics;
            RunTrace t;
            {
                py::gil_scoped_release release;
                t = run_simulation(spec, seed, o);
            }
            return trace_dict(t);
        },
        py::arg("config") = "", py::arg("seed") = 1, py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("diagnostics") = true);

    m.def("preset_ids", &preset_ids);
    m.def(
        "reproduce",
        [](const std::string& preset, std::optional<std::vector<std::uint64_t>> seeds, std::optional<int> horizon,
           std::optional<std::string> out_dir) {
            PresetOptions o;
            o.seeds = seeds;
            o.horizon = horizon;
            PresetOutcome res;
            {
                py::gil_scoped_release release;
                res = run_preset(preset, o);
                if (out_dir) write_outputs(res, *out_dir, OutputFormat::csv);
            }
            py::list metrics;
            for (const auto& mt : res.metrics) metrics.append(py::make_tuple(mt.scenario, mt.name, mt.value));
            return metrics;
        },
        py::arg("preset"), py::arg("seeds") = py::none(), py::arg("horizon") = py::none(),
        py::arg("out_dir") = py::none());
}
