// Command-line front end: run, reproduce, calibrate, estimate, sweep.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "spatial_sir/calibration.hpp"
#include "spatial_sir/output.hpp"

namespace fs = std::filesystem;
using namespace spatial_sir;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string out = "out";
    std::string seeds;
    int horizon = 0;
    std::string format = "csv";
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

ScenarioSpec load_spec(const std::string& path, const Common& c) {
    auto spec = parse_scenario(slurp(path));
    if (!c.seeds.empty()) spec.seeds = parse_seed_list(c.seeds);
    if (c.horizon > 0) spec.epidemic.horizon = c.horizon;
    validate_scenario(spec);
    return spec;
}

PresetOutcome outcome_of(const std::string& name, std::vector<ReplicationResult> reps) {
    PresetOutcome out;
    out.preset = name;
    for (auto& r : reps) {
        auto m = replication_metrics(r);
        out.metrics.insert(out.metrics.end(), m.begin(), m.end());
        out.replications.push_back(std::move(r));
    }
    return out;
}

void report(const std::vector<fs::path>& files) {
    for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

int cmd_run(const std::string& config, const Common& c) {
    const auto spec = load_spec(config, c);
    auto rep = run_replications(spec);
    std::printf("%s: final_size %.4f (sd %.4f) peak %.4f at day %d over %zu seeds\n", spec.scenario_id.c_str(),
                rep.final_size.mean, rep.final_size.sd, rep.peak.peak_i_frac, rep.peak.peak_day, rep.runs.size());
    report(write_outputs(outcome_of(spec.scenario_id, {std::move(rep)}), c.out, parse_output_format(c.format)));
    return 0;
}

int cmd_reproduce(const std::string& preset, const Common& c, const std::string& sir_contacts) {
    PresetOptions o;
    if (!c.seeds.empty()) o.seeds = parse_seed_list(c.seeds);
    if (c.horizon > 0) o.horizon = c.horizon;
    o.sir_contacts = parse_sir_contacts(sir_contacts);
    const auto outcome = run_preset(preset, o);
    for (const auto& m : outcome.metrics) {
        if (m.scenario == preset) std::printf("%s = %.6g\n", m.name.c_str(), m.value);
    }
    report(write_outputs(outcome, c.out, parse_output_format(c.format)));
    return 0;
}

std::pair<double, double> parse_range(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ValidationError("expected lo:hi, got " + s);
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
}

int cmd_calibrate(const std::string& config, const std::string& target_path, const Common& c,
                  const std::string& pi_range, const std::string& mu_range, int grid, int refine) {
    Common spec_opts = c;
    spec_opts.seeds.clear();
    const auto spec = load_spec(config, spec_opts);
    const auto target = read_target_csv(target_path);
    SearchConfig search;
    if (!c.seeds.empty()) search.seeds = parse_seed_list(c.seeds);
    if (!pi_range.empty()) std::tie(search.pi_lo, search.pi_hi) = parse_range(pi_range);
    if (!mu_range.empty()) std::tie(search.mu_lo, search.mu_hi) = parse_range(mu_range);
    search.grid = grid;
    search.refine_iterations = refine;
    const auto res = fit_pi_mu(target, spec, search);
    std::printf("contagion_prob %.6g move_distance %.6g loss %.6g evaluations %zu\n", res.pi_hat, res.mu_hat,
                res.loss, res.evaluations.size());
    fs::create_directories(c.out);
    write_text(fs::path(c.out) / "calibration.csv", calibration_report_csv(res));
    std::cout << "wrote " << (fs::path(c.out) / "calibration.csv").string() << "\n";
    return 0;
}

int cmd_estimate(const std::string& panel_path, const std::string& did, const Common& c) {
    const auto panel = read_panel_csv(panel_path);
    const std::string text = fs::exists(did) ? slurp(did) : did;
    const auto spec = parse_did_spec(text);
    const auto res = did_estimate(panel, spec);
    std::ostringstream os;
    os << "term,estimate,std_error\n";
    const auto& reg = res.regression;
    for (std::size_t k = 0; k < reg.names.size(); ++k) {
        const auto i = static_cast<Eigen::Index>(k);
        os << reg.names[k] << ',' << format_double(reg.coefficients[i]) << ',' << format_double(reg.std_errors[i])
           << '\n';
    }
    std::printf("outcome %s rows %zu treated %.6g", to_string(spec.outcome).c_str(), res.rows.size(), res.delta());
    if (auto x = res.interaction()) std::printf(" density_x_treated %.6g", *x);
    std::printf(" r_squared %.6f\n", reg.r_squared);
    const fs::path dir = c.out;
    write_text(dir / "did_coefficients.csv", os.str());
    const std::vector<NamedPrediction> pred{{to_string(spec.outcome), did_predict_daily(res, panel)}};
    write_text(dir / "did_predictions.csv", predictions_csv(pred));
    std::vector<fs::path> files{dir / "did_coefficients.csv", dir / "did_predictions.csv"};
    if (parse_output_format(c.format) == OutputFormat::csv_svg) {
        std::vector<ChartSeries> s(2);
        s[0].name = "actual";
        s[1].name = "fitted";
        for (const auto& d : pred[0].days) {
            s[0].values.push_back(d.mean_actual);
            s[1].values.push_back(d.mean_fitted);
        }
        write_text(dir / "did_predictions.svg", svg_chart("treated cities", s));
        files.push_back(dir / "did_predictions.svg");
    }
    report(files);
    return 0;
}

std::vector<std::string> sweep_values(const std::string& range) {
    std::vector<std::string> out;
    if (range.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(range);
        std::string p;
        while (std::getline(ss, p, ':')) parts.push_back(std::stod(p));
        if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
            throw ValidationError("sweep range must be lo:hi:step with step > 0");
        const auto steps = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (long k = 0; k <= steps; ++k) out.push_back(format_double(parts[0] + static_cast<double>(k) * parts[2]));
        return out;
    }
    std::stringstream ss(range);
    std::string v;
    while (std::getline(ss, v, ',')) {
        if (!v.empty()) out.push_back(v);
    }
    if (out.empty()) throw ValidationError("empty sweep range");
    return out;
}

int cmd_sweep(const std::string& config, const std::string& assignment, const Common& c) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ValidationError("sweep expects param=range, got " + assignment);
    const std::string key = assignment.substr(0, eq);
    const auto base = load_spec(config, c);
    std::vector<ReplicationResult> reps;
    for (const auto& v : sweep_values(assignment.substr(eq + 1))) {
        auto s = base;
        set_scenario_value(s, key, v);
        s.scenario_id = base.scenario_id + "_" + key + "_" + v;
        validate_scenario(s);
        auto rep = run_replications(s);
        std::printf("%s=%s: final_size %.4f peak %.4f at day %d\n", key.c_str(), v.c_str(), rep.final_size.mean,
                    rep.peak.peak_i_frac, rep.peak.peak_day);
        reps.push_back(std::move(rep));
    }
    report(write_outputs(outcome_of(base.scenario_id + "_sweep", std::move(reps)), c.out,
                         parse_output_format(c.format)));
    return 0;
}

int fail(const char* kind, const std::string& message, int code) {
    nlohmann::ordered_json j;
    j["status"] = "error";
    j["kind"] = kind;
    j["message"] = message;
    std::cerr << j.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial SIR simulator"};
    app.require_subcommand(1);
    Common c;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", c.out, "output directory")->capture_default_str();
        sub->add_option("--seeds", c.seeds, "seed list such as 1-20 or 1,4,9");
        sub->add_option("--horizon", c.horizon, "simulation horizon in days");
        sub->add_option("--format", c.format, "csv or csv+svg")->check(CLI::IsMember({"csv", "csv+svg"}));
    };

    std::string config, target, preset, panel, did, assignment;
    std::string pi_range, mu_range, sir_contacts = "calibrated";
    int grid = 5, refine = 4;

    auto* run = app.add_subcommand("run", "run a scenario config");
    run->add_option("config", config)->required();
    add_common(run);

    auto* rep = app.add_subcommand("reproduce", "run a named preset");
    rep->add_option("preset", preset)->required();
    rep->add_option("--sir-contacts", sir_contacts, "analytic, calibrated or measured");
    add_common(rep);

    auto* cal = app.add_subcommand("calibrate", "fit contagion probability and movement to a growth series");
    cal->add_option("config", config)->required();
    cal->add_option("target", target)->required();
    cal->add_option("--pi-range", pi_range, "lo:hi");
    cal->add_option("--mu-range", mu_range, "lo:hi");
    cal->add_option("--grid", grid)->capture_default_str();
    cal->add_option("--refine", refine)->capture_default_str();
    add_common(cal);

    auto* est = app.add_subcommand("estimate", "two-way fixed-effects DiD on a panel CSV");
    est->add_option("panel", panel)->required();
    est->add_option("did_spec", did, "file or inline text, e.g. \"outcome=infected; extra=density_x_treated\"")
        ->required();
    add_common(est);

    auto* sw = app.add_subcommand("sweep", "run a config over a parameter range");
    sw->add_option("config", config)->required();
    sw->add_option("assignment", assignment, "key=lo:hi:step or key=a,b,c")->required();
    add_common(sw);

    auto* list = app.add_subcommand("presets", "list preset ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail("usage", e.what(), 2);
    }

    try {
        if (*run) return cmd_run(config, c);
        if (*rep) return cmd_reproduce(preset, c, sir_contacts);
        if (*cal) return cmd_calibrate(config, target, c, pi_range, mu_range, grid, refine);
        if (*est) return cmd_estimate(panel, did, c);
        if (*sw) return cmd_sweep(config, assignment, c);
        if (*list) {
            for (const auto& id : preset_ids()) std::printf("%-28s %s\n", id.c_str(), preset_description(id).c_str());
            return 0;
        }
    } catch (const ConfigError& e) {
        return fail("config", e.what(), 3);
    } catch (const ValidationError& e) {
        return fail("validation", e.what(), 3);
    } catch (const IoError& e) {
        return fail("io", e.what(), 4);
    } catch (const std::exception& e) {
        return fail("internal", e.what(), 1);
    }
    return 0;
}
