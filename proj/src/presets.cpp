#include "spatial_sir/presets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace spatial_sir {

std::string to_string(SirContacts c) {
    switch (c) {
        case SirContacts::analytic: return "analytic";
        case SirContacts::calibrated: return "calibrated";
        case SirContacts::measured: return "measured";
    }
    return "calibrated";
}

SirContacts parse_sir_contacts(const std::string& s) {
    if (s == "analytic") return SirContacts::analytic;
    if (s == "calibrated") return SirContacts::calibrated;
    if (s == "measured") return SirContacts::measured;
    throw ValidationError("unknown SIR contact convention: " + s);
}

const ReplicationResult& ReplicationCache::get(const ScenarioSpec& spec, const std::vector<std::uint64_t>& seeds,
                                               const RunOptions& options) {
    const std::string key = std::to_string(spec_hash(spec)) + "|" + format_seed_list(seeds) + "|" +
                            std::to_string(options.diagnostics) + std::to_string(options.keep_attribution) + "|" +
                            (options.max_day ? std::to_string(*options.max_day) : std::string("-"));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        if (auto it = store_.find(key); it != store_.end()) return it->second;
    }
    auto rep = run_replications(spec, seeds, options);
    std::lock_guard<std::mutex> lock(mutex_);
    return store_.emplace(key, std::move(rep)).first->second;
}

double PresetOutcome::metric(const std::string& scenario, const std::string& name) const {
    for (const auto& m : metrics) {
        if (m.scenario == scenario && m.name == name) return m.value;
    }
    throw std::out_of_range("no metric " + scenario + "/" + name + " in preset " + preset);
}

const ReplicationResult& PresetOutcome::replication(const std::string& scenario_id) const {
    for (const auto& r : replications) {
        if (r.spec.scenario_id == scenario_id) return r;
    }
    throw std::out_of_range("no scenario " + scenario_id + " in preset " + preset);
}

const SirSeries& PresetOutcome::sir_series(const std::string& id) const {
    for (const auto& s : sir) {
        if (s.id == id) return s;
    }
    throw std::out_of_range("no SIR series " + id + " in preset " + preset);
}

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) throw ValidationError("sup_distance of an empty series");
    const std::size_t len = std::max(a.size(), b.size());
    double sup = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
        const double x = t < a.size() ? a[t] : a.back();
        const double y = t < b.size() ? b[t] : b.back();
        sup = std::max(sup, std::abs(x - y));
    }
    return sup;
}

std::vector<double> sir_infected_share(const SirSeries& s) {
    std::vector<double> out;
    out.reserve(s.states.size());
    for (const auto& st : s.states) out.push_back(st.i / s.n);
    return out;
}

SirParams sir_counterpart(const ScenarioSpec& spec, SirContacts contacts, double measured_contacts) {
    const auto& e = spec.epidemic;
    const auto derived = derive_quantities(e, spec.geography);
    double c = derived.contacts;
    if (contacts == SirContacts::calibrated) c = kCalibratedContacts * derived.density / kBaselineDensity;
    if (contacts == SirContacts::measured) c = measured_contacts;
    return SirParams::linear(e.contagion_prob * c, e.recovery_prob, static_cast<double>(e.n_agents));
}

std::vector<Metric> replication_metrics(const ReplicationResult& rep) {
    const auto& id = rep.spec.scenario_id;
    std::vector<Metric> out;
    auto add = [&](const std::string& name, double v) { out.push_back({id, name, v}); };
    add("seeds", static_cast<double>(rep.runs.size()));
    add("final_size_mean", rep.final_size.mean);
    add("final_size_sd", rep.final_size.sd);
    add("final_size", rep.peak.final_size);
    add("peak_i_frac", rep.peak.peak_i_frac);
    add("peak_day", rep.peak.peak_day);
    add("peak_i_frac_run_mean", rep.peak_i_frac.mean);
    add("peak_day_run_mean", rep.peak_day.mean);
    if (rep.r0_hat.count > 0) {
        add("r0_hat_mean", rep.r0_hat.mean);
        add("r0_hat_sd", rep.r0_hat.sd);
    }
    const auto cum = rep.cumulative_share();
    add("cumulative_at_peak", cum[static_cast<std::size_t>(rep.peak.peak_day)]);
    double iso_peak = 0.0;
    double iso_sum = 0.0;
    for (const auto& d : rep.averaged) {
        iso_peak = std::max(iso_peak, d.isolation_share);
        iso_sum += d.isolation_share;
    }
    add("peak_isolation_share", iso_peak);
    add("mean_isolation_share", iso_sum / static_cast<double>(rep.averaged.size()));
    add("initial_contacts", rep.averaged.front().avg_contacts);
    add("non_converged", rep.non_converged);
    return out;
}

namespace {

struct PresetInfo {
    const char* id;
    const char* description;
};

const PresetInfo kPresets[] = {
    {"baseline", "calibrated city, clustered outbreak, 20 seeds"},
    {"fig2_sir_comparison", "spatial city against mean-field SIR; daily relocation variant"},
    {"fig4_random_outbreak", "clustered against randomly located initial infections"},
    {"fig5_size", "quarter, baseline and fourfold population at constant density"},
    {"fig6_density_pi_tradeoff", "six times the contagion probability at one sixth of the density"},
    {"fig7_density", "half and double density against baseline, with SIR counterparts"},
    {"fig8_heterogeneous_density", "density declining from the centre, outbreak at the centre"},
    {"fig9_movement", "no movement and 20% movement speed against baseline"},
    {"appendix_four_clusters", "fourfold city seeded with four symmetric clusters"},
    {"fig_behavioral", "global behavioral response, spatial against SIR"},
    {"fig_local_behavior", "neighborhood-driven against global behavioral response"},
    {"fig10_beta_bias", "growth regression estimate of beta across densities 0.5 to 1.5"},
    {"fig11_lockdown_gap", "lockdown effect in spatial cities against SIR at estimated beta"},
    {"fig12_did_full", "two-way fixed-effects DiD, treated and untreated cities at every density"},
    {"fig13_did_partial", "two-way fixed-effects DiD, treated only below density 1"},
    {"table5", "treatment coefficients, full against partial design, with and without behavior"},
};

constexpr int kPanelCutoff = 80;
constexpr int kLockdownDay = 20;

std::vector<std::uint64_t> replication_seeds(const PresetOptions& o) { return o.seeds.value_or(default_seeds(20)); }
std::vector<std::uint64_t> city_seeds(const PresetOptions& o) { return o.seeds.value_or(default_seeds(5)); }

ScenarioSpec base_spec(const std::string& id, const PresetOptions& o, bool estimation = false) {
    ScenarioSpec s;
    s.scenario_id = id;
    s.seeds = estimation ? city_seeds(o) : replication_seeds(o);
    if (o.horizon) s.epidemic.horizon = *o.horizon;
    return s;
}

void set_relative_density(ScenarioSpec& s, double k) { s.geography.city_side = std::sqrt(1.0 / k); }

void scale_size(ScenarioSpec& s, double factor) {
    s.epidemic.n_agents = static_cast<Count>(std::llround(static_cast<double>(s.epidemic.n_agents) * factor));
    s.geography.city_side *= std::sqrt(factor);
}

void use_global_behavior(ScenarioSpec& s) { s.behavior.kind = BehaviorKind::global; }

std::vector<double> panel_densities() {
    std::vector<double> out;
    for (int k = 5; k <= 15; ++k) out.push_back(k / 10.0);
    return out;
}

std::string density_tag(double k) { return format_double(k); }

ScenarioSpec city_spec(double density, bool behavior, std::optional<int> treatment_day, const PresetOptions& o) {
    std::string id = "city_d" + density_tag(density) + (behavior ? "_behavior" : "_plain") +
                     (treatment_day ? "_lock" + std::to_string(*treatment_day) : std::string("_never"));
    auto s = base_spec(id, o, true);
    set_relative_density(s, density);
    if (behavior) use_global_behavior(s);
    if (treatment_day) s.lockdown = LockdownPolicy{0.25, *treatment_day, LockdownSelection::random};
    return s;
}

RunOptions panel_options() {
    RunOptions r;
    r.diagnostics = false;
    r.max_day = kPanelCutoff;
    return r;
}

class Runner {
public:
    explicit Runner(const PresetOptions& o) : options_(o) {
        if (!options_.cache) {
            own_ = std::make_unique<ReplicationCache>();
            options_.cache = own_.get();
        }
    }

    const ReplicationResult& run(const ScenarioSpec& s, const RunOptions& r = {}) {
        validate_scenario(s);
        return options_.cache->get(s, s.seeds, r);
    }

    const PresetOptions& options() const { return options_; }

private:
    PresetOptions options_;
    std::unique_ptr<ReplicationCache> own_;
};

void add_replication(PresetOutcome& out, const ReplicationResult& rep) {
    out.replications.push_back(rep);
    auto m = replication_metrics(rep);
    out.metrics.insert(out.metrics.end(), m.begin(), m.end());
}

SirSeries make_sir(const std::string& id, const SirParams& params, const ScenarioSpec& spec,
                   const std::optional<BehavioralParams>& behavior = std::nullopt,
                   const std::optional<SirLockdown>& lockdown = std::nullopt) {
    SirSeries s;
    s.id = id;
    s.n = params.n;
    s.behavior = behavior;
    s.states = simulate_sir(params, static_cast<double>(spec.epidemic.initial_infected), spec.epidemic.horizon,
                            behavior, lockdown);
    return s;
}

void add_sir(PresetOutcome& out, SirSeries s) {
    const auto p = summarize_sir(s.states);
    out.metrics.push_back({s.id, "peak_i_frac", p.peak_i_frac});
    out.metrics.push_back({s.id, "peak_day", static_cast<double>(p.peak_day)});
    out.metrics.push_back({s.id, "final_size", p.final_size});
    if (s.behavior) {
        double iso = 0.0;
        for (const auto& st : s.states) iso = std::max(iso, 1.0 - alpha_response(st.i / s.n, *s.behavior));
        out.metrics.push_back({s.id, "peak_isolation_share", iso});
    }
    out.sir.push_back(std::move(s));
}

SirSeries sir_for(const std::string& id, const ScenarioSpec& spec, const ReplicationResult& rep,
                  const PresetOptions& o, const std::optional<BehavioralParams>& behavior = std::nullopt) {
    const auto params = sir_counterpart(spec, o.sir_contacts, rep.averaged.front().avg_contacts);
    return make_sir(id, params, spec, behavior);
}

// Gap between realized hazard and prior-day prevalence on the seed average.
void add_lambda_metrics(PresetOutcome& out, const ReplicationResult& rep) {
    const auto& days = rep.averaged;
    const double n = rep.n();
    std::vector<double> gap;
    std::vector<double> prev;
    for (std::size_t t = 1; t < days.size(); ++t) {
        if (!days[t].lambda_hat || days[t - 1].i <= 0.0) continue;
        gap.push_back(*days[t].lambda_hat - days[t - 1].i / n);
        prev.push_back(days[t - 1].i / n);
    }
    double early = 0.0;
    int early_n = 0;
    std::size_t k = 0;
    for (; k < gap.size() && early_n < 10; ++k) {
        if (prev[k] > 0.01) {
            early += gap[k];
            ++early_n;
        }
    }
    double late_max = -1.0;
    for (std::size_t j = k; j < gap.size(); ++j) late_max = std::max(late_max, gap[j]);
    double abs_sum = 0.0;
    for (double g : gap) abs_sum += std::abs(g);
    const auto& id = rep.spec.scenario_id;
    out.metrics.push_back({id, "early_lambda_gap", early_n ? early / early_n : 0.0});
    out.metrics.push_back({id, "late_lambda_gap_max", late_max});
    out.metrics.push_back({id, "mean_abs_lambda_gap", gap.empty() ? 0.0 : abs_sum / static_cast<double>(gap.size())});
}

struct CityBatch {
    ScenarioSpec spec;
    double density = 1.0;
    bool behavior = false;
    std::optional<int> treatment_day;
};

std::vector<CityRun> to_city_runs(Runner& runner, PresetOutcome& out, const std::vector<CityBatch>& batches) {
    std::vector<CityRun> cities;
    int id = 0;
    for (const auto& b : batches) {
        const auto& rep = runner.run(b.spec, panel_options());
        const bool known = std::any_of(out.replications.begin(), out.replications.end(),
                                       [&](const ReplicationResult& r) { return r.spec == rep.spec; });
        if (!known) out.replications.push_back(rep);
        for (const auto& trace : rep.runs) cities.push_back({id++, b.density, b.treatment_day, trace});
    }
    return cities;
}

std::vector<CityBatch> beta_batches(bool behavior, const PresetOptions& o) {
    std::vector<CityBatch> out;
    for (double k : panel_densities()) out.push_back({city_spec(k, behavior, std::nullopt, o), k, behavior, {}});
    return out;
}

std::vector<CityBatch> did_batches(bool behavior, bool partial, const PresetOptions& o) {
    std::vector<CityBatch> out;
    for (double k : panel_densities()) {
        const bool low = k < 1.0 - 1e-9;
        if (!partial || !low) out.push_back({city_spec(k, behavior, std::nullopt, o), k, behavior, {}});
        if (!partial || low) out.push_back({city_spec(k, behavior, kLockdownDay, o), k, behavior, kLockdownDay});
    }
    return out;
}

std::vector<CityBatch> table5_batches(const PresetOptions& o) {
    std::vector<CityBatch> out;
    for (bool behavior : {false, true}) {
        for (double k : {0.5, 1.0, 1.5}) {
            for (std::optional<int> day : {std::optional<int>{}, std::optional<int>{15}, std::optional<int>{40}}) {
                out.push_back({city_spec(k, behavior, day, o), k, behavior, day});
            }
        }
    }
    return out;
}

const char* behavior_tag(bool behavior) { return behavior ? "behavior" : "no_behavior"; }

std::map<double, BetaEstimate> run_beta(Runner& runner, PresetOutcome& out, bool behavior) {
    const auto batches = beta_batches(behavior, runner.options());
    const auto cities = to_city_runs(runner, out, batches);
    auto panel = build_panel(cities, kPanelCutoff);
    auto est = estimate_beta_by_density(panel);
    const std::string tag = behavior_tag(behavior);
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true;
    for (const auto& b : batches) {
        const auto& e = est.at(std::round(b.density * 1e6) / 1e6);
        const double beta = derive_quantities(b.spec.epidemic, b.spec.geography).beta;
        const double ratio = e.beta_hat / beta;
        out.metrics.push_back({tag, "beta_hat_d" + density_tag(b.density), e.beta_hat});
        out.metrics.push_back({tag, "beta_d" + density_tag(b.density), beta});
        out.metrics.push_back({tag, "beta_ratio_d" + density_tag(b.density), ratio});
        if (ratio > prev) monotone = false;
        prev = ratio;
    }
    out.metrics.push_back({tag, "beta_ratio_nonincreasing", monotone ? 1.0 : 0.0});
    out.panels.push_back({std::string("beta_") + tag, std::move(panel)});
    return est;
}

void run_did(Runner& runner, PresetOutcome& out, bool partial) {
    for (bool behavior : {false, true}) {
        const auto cities = to_city_runs(runner, out, did_batches(behavior, partial, runner.options()));
        auto panel = build_panel(cities, kPanelCutoff);
        const std::string tag = behavior_tag(behavior);
        for (DidOutcome outcome : {DidOutcome::infected, DidOutcome::contacts, DidOutcome::growth}) {
            DidSpec spec;
            spec.outcome = outcome;
            const auto res = did_estimate(panel, spec);
            const std::string name = to_string(outcome);
            out.metrics.push_back({tag, "delta_" + name, res.delta()});

            double fit = 0.0;
            double act = 0.0;
            std::size_t treated_rows = 0;
            for (std::size_t r = 0; r < res.rows.size(); ++r) {
                if (!panel[res.rows[r]].treated) continue;
                fit += res.regression.fitted[static_cast<Eigen::Index>(r)];
                act += res.outcome[static_cast<Eigen::Index>(r)];
                ++treated_rows;
            }
            const double tr = static_cast<double>(treated_rows);
            out.metrics.push_back({tag, "ate_gap_" + name, std::abs(fit / tr - act / tr)});

            const auto daily = did_predict_daily(res, panel);
            if (outcome == DidOutcome::infected) {
                double min_excess = std::numeric_limits<double>::infinity();
                double rel = 0.0;
                int days = 0;
                for (const auto& d : daily) {
                    if (d.day < 35 || d.day >= kPanelCutoff) continue;
                    min_excess = std::min(min_excess, d.mean_fitted - d.mean_actual);
                    if (d.mean_actual > 0.0) rel += d.mean_fitted / d.mean_actual - 1.0;
                    ++days;
                }
                out.metrics.push_back({tag, "late_min_overprediction", min_excess});
                out.metrics.push_back({tag, "late_mean_relative_overprediction", days ? rel / days : 0.0});
            }
            out.predictions.push_back({tag + "_" + name, daily});
        }
        out.metrics.push_back({tag, "panel_rows", static_cast<double>(panel.size())});
        out.panels.push_back({std::string("did_") + tag, std::move(panel)});
    }
}

PresetOutcome run_fig11(Runner& runner) {
    PresetOutcome out;
    // The estimation runs stop at the panel cutoff; only full runs are reported.
    std::vector<ReplicationResult> full;
    const auto& o = runner.options();
    for (bool behavior : {false, true}) {
        const auto est = run_beta(runner, out, behavior);
        const std::string tag = behavior_tag(behavior);
        for (double k : {0.5, 1.0, 1.5}) {
            auto open = city_spec(k, behavior, std::nullopt, o);
            auto shut = city_spec(k, behavior, kLockdownDay, o);
            const auto& a = runner.run(open);
            const auto& b = runner.run(shut);
            full.push_back(a);
            full.push_back(b);
            const auto ia = a.infected_share();
            const auto ib = b.infected_share();
            double gap_max = 0.0;
            int gap_day = 0;
            for (std::size_t t = 0; t < std::max(ia.size(), ib.size()); ++t) {
                const double g = (t < ia.size() ? ia[t] : ia.back()) - (t < ib.size() ? ib[t] : ib.back());
                if (std::abs(g) > std::abs(gap_max)) {
                    gap_max = g;
                    gap_day = static_cast<int>(t);
                }
            }
            const double beta_hat = est.at(std::round(k * 1e6) / 1e6).beta_hat;
            const auto params = SirParams::linear(beta_hat, open.epidemic.recovery_prob,
                                                  static_cast<double>(open.epidemic.n_agents));
            std::optional<BehavioralParams> bp;
            if (behavior) bp = open.behavior.params;
            const std::string base = tag + "_d" + density_tag(k);
            auto sa = make_sir("sir_" + base + "_open", params, open, bp);
            auto sb = make_sir("sir_" + base + "_lockdown", params, open, bp, SirLockdown{0.25, kLockdownDay});
            const auto ja = sir_infected_share(sa);
            const auto jb = sir_infected_share(sb);
            double sir_max = 0.0;
            int sir_day = 0;
            for (std::size_t t = 0; t < ja.size(); ++t) {
                if (std::abs(ja[t] - jb[t]) > std::abs(sir_max)) {
                    sir_max = ja[t] - jb[t];
                    sir_day = static_cast<int>(t);
                }
            }
            out.metrics.push_back({base, "spatial_max_effect", gap_max});
            out.metrics.push_back({base, "spatial_max_effect_day", static_cast<double>(gap_day)});
            out.metrics.push_back({base, "sir_max_effect", sir_max});
            out.metrics.push_back({base, "sir_max_effect_day", static_cast<double>(sir_day)});
            out.sir.push_back(std::move(sa));
            out.sir.push_back(std::move(sb));
        }
    }
    out.replications = std::move(full);
    return out;
}

}  // namespace

const std::vector<std::string>& preset_ids() {
    static const std::vector<std::string> ids = [] {
        std::vector<std::string> v;
        for (const auto& p : kPresets) v.emplace_back(p.id);
        return v;
    }();
    return ids;
}

bool is_preset(const std::string& id) {
    const auto& ids = preset_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::string preset_description(const std::string& id) {
    for (const auto& p : kPresets) {
        if (id == p.id) return p.description;
    }
    throw ValidationError("unknown preset: " + id);
}

std::vector<ScenarioSpec> preset_scenarios(const std::string& id, const PresetOptions& o) {
    std::vector<ScenarioSpec> out;
    auto plain = [&](const std::string& sid) { return base_spec(sid, o); };
    if (id == "baseline") {
        out.push_back(plain("baseline"));
    } else if (id == "fig2_sir_comparison") {
        out.push_back(plain("baseline"));
        auto s = plain("daily_redraw");
        s.geography.relocation_mode = RelocationMode::daily_uniform_redraw;
        out.push_back(s);
    } else if (id == "fig4_random_outbreak") {
        out.push_back(plain("baseline"));
        auto s = plain("random_outbreak");
        s.geography.outbreak_mode = OutbreakMode::random;
        out.push_back(s);
    } else if (id == "fig5_size") {
        auto q = plain("quarter_city");
        scale_size(q, 0.25);
        out.push_back(q);
        out.push_back(plain("baseline"));
        auto f = plain("fourfold_city");
        scale_size(f, 4.0);
        out.push_back(f);
    } else if (id == "fig6_density_pi_tradeoff") {
        out.push_back(plain("baseline"));
        auto s = plain("six_pi_sixth_density");
        s.epidemic.contagion_prob *= 6.0;
        set_relative_density(s, 1.0 / 6.0);
        out.push_back(s);
    } else if (id == "fig7_density") {
        auto lo = plain("half_density");
        set_relative_density(lo, 0.5);
        out.push_back(lo);
        out.push_back(plain("baseline"));
        auto hi = plain("double_density");
        set_relative_density(hi, 2.0);
        out.push_back(hi);
    } else if (id == "fig8_heterogeneous_density") {
        out.push_back(plain("baseline"));
        auto s = plain("heterogeneous");
        s.geography.density_mode = DensityMode::heterogeneous;
        s.geography.cluster_anchor = {0.5, 0.5};
        out.push_back(s);
    } else if (id == "fig9_movement") {
        out.push_back(plain("baseline"));
        auto z = plain("no_movement");
        z.epidemic.move_distance = 0.0;
        out.push_back(z);
        auto slow = plain("slow_movement");
        slow.epidemic.move_distance *= 0.2;
        out.push_back(slow);
    } else if (id == "appendix_four_clusters") {
        out.push_back(plain("baseline"));
        auto s = plain("fourfold_four_clusters");
        scale_size(s, 4.0);
        s.epidemic.initial_infected *= 4;
        s.geography.outbreak_mode = OutbreakMode::symmetric_clusters;
        s.geography.cluster_count = 4;
        out.push_back(s);
    } else if (id == "fig_behavioral") {
        out.push_back(plain("baseline"));
        auto s = plain("behavioral");
        use_global_behavior(s);
        out.push_back(s);
    } else if (id == "fig_local_behavior") {
        auto g = plain("behavioral");
        use_global_behavior(g);
        out.push_back(g);
        auto l = plain("local_behavioral");
        l.behavior.kind = BehaviorKind::local;
        out.push_back(l);
    } else if (id == "fig10_beta_bias") {
        for (bool b : {false, true}) {
            for (const auto& c : beta_batches(b, o)) out.push_back(c.spec);
        }
    } else if (id == "fig11_lockdown_gap") {
        for (bool b : {false, true}) {
            for (const auto& c : beta_batches(b, o)) out.push_back(c.spec);
            for (double k : {0.5, 1.5}) out.push_back(city_spec(k, b, kLockdownDay, o));
            out.push_back(city_spec(1.0, b, kLockdownDay, o));
        }
    } else if (id == "fig12_did_full" || id == "fig13_did_partial") {
        for (bool b : {false, true}) {
            for (const auto& c : did_batches(b, id == "fig13_did_partial", o)) out.push_back(c.spec);
        }
    } else if (id == "table5") {
        for (const auto& c : table5_batches(o)) out.push_back(c.spec);
    } else {
        throw ValidationError("unknown preset: " + id);
    }
    for (const auto& s : out) validate_scenario(s);
    return out;
}

PresetOutcome run_preset(const std::string& id, const PresetOptions& options) {
    if (!is_preset(id)) throw ValidationError("unknown preset: " + id);
    Runner runner(options);
    const auto& o = runner.options();
    PresetOutcome out;

    if (id == "fig10_beta_bias") {
        out.preset = id;
        for (bool b : {false, true}) run_beta(runner, out, b);
        return out;
    }
    if (id == "fig11_lockdown_gap") {
        out = run_fig11(runner);
        out.preset = id;
        return out;
    }
    if (id == "fig12_did_full" || id == "fig13_did_partial") {
        out.preset = id;
        run_did(runner, out, id == "fig13_did_partial");
        return out;
    }
    if (id == "table5") {
        out.preset = id;
        std::vector<CatalogEntry> catalog;
        for (const auto& b : table5_batches(o)) {
            const auto& rep = runner.run(b.spec, panel_options());
            out.replications.push_back(rep);
            for (const auto& t : rep.runs) catalog.push_back({b.behavior, b.density, b.treatment_day, t.seed, t});
        }
        out.table = treatment_table(catalog, kPanelCutoff);
        for (const auto& r : out.table->rows) {
            const std::string tag = std::string(behavior_tag(r.behavior)) + "_" + to_string(r.outcome) +
                                    (r.interaction ? "_interaction" : "_plain");
            out.metrics.push_back({tag, "true_treated", r.true_treated});
            out.metrics.push_back({tag, "estimated_treated", r.estimated_treated});
            if (r.true_interaction) out.metrics.push_back({tag, "true_density_x_treated", *r.true_interaction});
            if (r.estimated_interaction)
                out.metrics.push_back({tag, "estimated_density_x_treated", *r.estimated_interaction});
        }
        return out;
    }

    out.preset = id;
    const auto specs = preset_scenarios(id, o);
    for (const auto& s : specs) add_replication(out, runner.run(s));
    auto rep = [&](const std::string& sid) -> const ReplicationResult& { return out.replication(sid); };
    auto m = [&](const std::string& sid, const std::string& name) { return out.metric(sid, name); };
    auto put = [&](const std::string& name, double v) { out.metrics.push_back({id, name, v}); };

    if (id == "fig2_sir_comparison") {
        const auto& b = rep("baseline");
        add_lambda_metrics(out, b);
        add_lambda_metrics(out, rep("daily_redraw"));
        for (auto c : {SirContacts::analytic, SirContacts::calibrated, SirContacts::measured}) {
            PresetOptions alt = o;
            alt.sir_contacts = c;
            add_sir(out, sir_for("sir_" + to_string(c), b.spec, b, alt));
        }
    } else if (id == "fig4_random_outbreak") {
        put("peak_day_ratio", m("baseline", "peak_day") / m("random_outbreak", "peak_day"));
        put("final_size_gap", std::abs(m("baseline", "final_size") - m("random_outbreak", "final_size")));
    } else if (id == "fig5_size") {
        for (const char* sid : {"quarter_city", "baseline", "fourfold_city"}) {
            add_sir(out, sir_for(std::string("sir_") + sid, rep(sid).spec, rep(sid), o));
        }
    } else if (id == "fig6_density_pi_tradeoff") {
        put("sup_distance", sup_distance(rep("baseline").infected_share(), rep("six_pi_sixth_density").infected_share()));
        const auto& b = rep("baseline").spec;
        const double c = kCalibratedContacts;
        const double pi = b.epidemic.contagion_prob;
        const double n = static_cast<double>(b.epidemic.n_agents);
        auto s1 = make_sir("sir_baseline", SirParams::linear(pi * c, b.epidemic.recovery_prob, n), b);
        auto s6 = make_sir("sir_six_pi_sixth_contacts",
                           SirParams::linear((6.0 * pi) * (c / 6.0), b.epidemic.recovery_prob, n), b);
        put("sir_sup_distance", sup_distance(sir_infected_share(s1), sir_infected_share(s6)));
        add_sir(out, std::move(s1));
        add_sir(out, std::move(s6));
    } else if (id == "fig7_density") {
        for (const char* sid : {"half_density", "baseline", "double_density"}) {
            add_sir(out, sir_for(std::string("sir_") + sid, rep(sid).spec, rep(sid), o));
        }
        put("final_size_ratio", m("double_density", "final_size") / m("half_density", "final_size"));
        put("peak_ratio", m("double_density", "peak_i_frac") / m("half_density", "peak_i_frac"));
        put("peak_day_ratio", m("half_density", "peak_day") / m("double_density", "peak_day"));
        put("sir_final_size_ratio", m("sir_double_density", "final_size") / m("sir_half_density", "final_size"));
        put("sir_peak_ratio", m("sir_double_density", "peak_i_frac") / m("sir_half_density", "peak_i_frac"));
        put("sir_peak_day_ratio", m("sir_half_density", "peak_day") / m("sir_double_density", "peak_day"));
    } else if (id == "fig9_movement") {
        put("no_movement_final_size_drop", m("baseline", "final_size") - m("no_movement", "final_size"));
        put("slow_peak_delay", m("slow_movement", "peak_day") - m("baseline", "peak_day"));
    } else if (id == "appendix_four_clusters") {
        put("sup_distance",
            sup_distance(rep("baseline").infected_share(), rep("fourfold_four_clusters").infected_share()));
    } else if (id == "fig_behavioral") {
        const auto& b = rep("behavioral");
        add_sir(out, sir_for("sir_baseline", rep("baseline").spec, rep("baseline"), o));
        add_sir(out, sir_for("sir_behavioral", b.spec, b, o, b.spec.behavior.params));
        put("peak_ratio", m("behavioral", "peak_i_frac") / m("sir_behavioral", "peak_i_frac"));
        put("isolation_ratio", m("behavioral", "peak_isolation_share") / m("sir_behavioral", "peak_isolation_share"));
    } else if (id == "fig_local_behavior") {
        const auto& g = rep("behavioral");
        const auto& l = rep("local_behavioral");
        const std::size_t len = std::max(g.averaged.size(), l.averaged.size());
        auto time_avg = [&](const ReplicationResult& r) {
            double sum = 0.0;
            for (std::size_t t = 0; t < len; ++t) {
                sum += (t < r.averaged.size() ? r.averaged[t] : r.averaged.back()).isolation_share;
            }
            return sum / static_cast<double>(len);
        };
        const double ga = time_avg(g);
        const double la = time_avg(l);
        put("global_time_avg_isolation", ga);
        put("local_time_avg_isolation", la);
        put("isolation_ratio", ga > 0.0 ? la / ga : 0.0);
        put("sup_distance", sup_distance(g.infected_share(), l.infected_share()));
    }
    return out;
}

}  // namespace spatial_sir
