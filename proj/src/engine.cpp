#include "spatial_sir/engine.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "spatial_sir/behavior.hpp"
#include "spatial_sir/contact_grid.hpp"

namespace spatial_sir {

namespace {

void update_flags(CityState& state, const ScenarioSpec& spec, double i_frac, RngStreams& streams) {
    switch (spec.behavior.kind) {
        case BehaviorKind::none: break;
        case BehaviorKind::global:
            apply_global_behavior(state, isolation_share(i_frac, spec.behavior.params));
            break;
        case BehaviorKind::local:
            apply_local_behavior(state, spec.epidemic.contagion_radius, spec.behavior.params);
            break;
    }
    if (spec.lockdown) apply_lockdown(state, *spec.lockdown, streams.lockdown);
}

DayRecord make_record(const CityState& state, Count new_infections) {
    DayRecord rec;
    rec.day = state.day;
    const auto c = state.counts();
    rec.s = c.s;
    rec.i = c.i;
    rec.r = c.r;
    rec.new_infections = new_infections;
    std::size_t iso = 0;
    std::size_t lock = 0;
    for (std::size_t k = 0; k < state.size(); ++k) {
        if (state.locked[k]) {
            ++lock;
        } else if (state.isolated[k]) {
            ++iso;
        }
    }
    const auto n = static_cast<double>(state.size());
    rec.isolation_share = static_cast<double>(iso) / n;
    rec.locked_share = static_cast<double>(lock) / n;
    return rec;
}

double mean_contacts(const ContactGrid& grid, const CityState& state, std::span<const std::uint8_t> member) {
    std::size_t members = 0;
    for (auto m : member) members += m;
    if (members == 0) return 0.0;
    std::size_t pairs = 0;
    grid.for_each_pair(state.positions, [&](std::size_t, std::size_t) { ++pairs; });
    return 2.0 * static_cast<double>(pairs) / static_cast<double>(members);
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t k = 0; k < n; ++k) fn(k);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t k = w; k < n; k += workers) fn(k);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

CityState initial_city(const ScenarioSpec& spec, RngStreams& streams) {
    const auto& e = spec.epidemic;
    auto positions = place_agents(spec.geography, e.n_agents, streams.placement);
    auto health = seed_outbreak(positions, e.initial_infected, spec.geography, streams.outbreak);
    std::vector<double> risk(positions.size());
    for (auto& r : risk) r = streams.risk.uniform();
    CityState state(spec.geography.city_side, std::move(positions), std::move(health), std::move(risk));
    state.day = 0;
    const auto c = state.counts();
    update_flags(state, spec, static_cast<double>(c.i) / static_cast<double>(state.size()), streams);
    return state;
}

RunTrace run_simulation(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& options) {
    const auto checked = validate_params(spec.epidemic, spec.geography);
    validate_behavior(spec.behavior);
    if (spec.lockdown) validate_lockdown(*spec.lockdown);
    const auto& e = spec.epidemic;
    const double beta = checked.derived.beta;

    RngStreams streams(seed, spec.stream_salt);
    CityState state = initial_city(spec, streams);

    RunTrace trace;
    trace.scenario_id = spec.scenario_id;
    trace.seed = seed;
    trace.n = e.n_agents;

    ContactGrid grid;
    std::vector<std::uint8_t> member = state.participation();
    grid.build(state.positions, member, state.side, e.contagion_radius);
    double contacts = options.diagnostics ? mean_contacts(grid, state, member) : 0.0;

    DayRecord rec0 = make_record(state, 0);
    rec0.avg_contacts = contacts;
    trace.days.push_back(rec0);

    const int last_day = options.max_day ? std::min(*options.max_day, e.horizon) : e.horizon;
    Count infected = rec0.i;
    Count susceptible = rec0.s;
    const bool static_positions =
        spec.geography.relocation_mode == RelocationMode::frozen ||
        (spec.geography.relocation_mode == RelocationMode::walk && e.move_distance <= 0.0);
    for (int t = 1; t <= last_day && infected > 0; ++t) {
        const double i_frac = static_cast<double>(infected) / static_cast<double>(e.n_agents);
        step_movement(state, e.move_distance, spec.geography, streams.movement);
        state.day = t;
        update_flags(state, spec, i_frac, streams);

        auto next_member = state.participation();
        if (!static_positions || next_member != member) {
            member = std::move(next_member);
            grid.build(state.positions, member, state.side, e.contagion_radius);
            if (options.diagnostics) contacts = mean_contacts(grid, state, member);
        }

        const auto tx = step_transmission(state, e.contagion_prob, grid, streams.transmission);
        step_recovery(state, e.recovery_prob, streams.recovery);

        const auto new_inf = static_cast<Count>(tx.newly_infected.size());
        DayRecord rec = make_record(state, new_inf);
        rec.avg_contacts = contacts;
        if (susceptible > 0 && beta > 0.0) {
            rec.lambda_hat = (static_cast<double>(new_inf) / static_cast<double>(susceptible)) / beta;
        }
        infected = rec.i;
        susceptible = rec.s;
        trace.days.push_back(rec);
    }

    const auto& last = trace.days.back();
    const auto n = static_cast<double>(e.n_agents);
    trace.converged = last.i == 0;
    trace.final_size = static_cast<double>(last.r) / n;
    for (const auto& d : trace.days) {
        const double f = static_cast<double>(d.i) / n;
        if (f > trace.peak_i_frac) {
            trace.peak_i_frac = f;
            trace.peak_day = d.day;
        }
    }

    Attribution attr{state.infected_on, state.infector};
    try {
        trace.r0_hat = estimate_r0(attr);
    } catch (const ValidationError&) {
        trace.r0_hat.reset();
    }
    if (options.keep_attribution) trace.attribution = std::move(attr);
    return trace;
}

double estimate_r0(const Attribution& attribution) {
    const auto n = attribution.infected_on.size();
    std::vector<std::uint8_t> in_cohort(n, 0);
    std::size_t cohort = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const int d = attribution.infected_on[i];
        if (d >= 0 && d <= 4) {
            in_cohort[i] = 1;
            ++cohort;
        }
    }
    if (cohort == 0) throw ValidationError("empty cohort");
    std::size_t secondary = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const auto src = attribution.infector[j];
        if (src >= 0 && in_cohort[static_cast<std::size_t>(src)]) ++secondary;
    }
    return static_cast<double>(secondary) / static_cast<double>(cohort);
}

Stat mean_sd(std::span<const double> values) {
    Stat s;
    s.count = values.size();
    if (values.empty()) return s;
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

std::vector<MeanDay> average_traces(std::span<const RunTrace> runs) {
    std::vector<MeanDay> out;
    if (runs.empty()) return out;
    std::size_t len = 0;
    for (const auto& r : runs) len = std::max(len, r.days.size());
    out.resize(len);
    std::vector<std::size_t> lambda_n(len, 0);
    std::vector<double> lambda_sum(len, 0.0);
    const auto k = static_cast<double>(runs.size());
    for (const auto& run : runs) {
        for (std::size_t t = 0; t < len; ++t) {
            const bool have = t < run.days.size();
            const DayRecord& d = have ? run.days[t] : run.days.back();
            auto& m = out[t];
            m.day = static_cast<int>(t);
            m.s += static_cast<double>(d.s) / k;
            m.i += static_cast<double>(d.i) / k;
            m.r += static_cast<double>(d.r) / k;
            m.avg_contacts += d.avg_contacts / k;
            m.isolation_share += d.isolation_share / k;
            m.locked_share += d.locked_share / k;
            if (have) {
                m.new_infections += static_cast<double>(d.new_infections) / k;
                if (d.lambda_hat) {
                    lambda_sum[t] += *d.lambda_hat;
                    ++lambda_n[t];
                }
            }
        }
    }
    for (std::size_t t = 0; t < len; ++t) {
        if (lambda_n[t] > 0) out[t].lambda_hat = lambda_sum[t] / static_cast<double>(lambda_n[t]);
    }
    return out;
}

PeakSummary summarize_peak(std::span<const MeanDay> averaged, double n) {
    if (averaged.empty()) throw ValidationError("summarize_peak requires a non-empty trace");
    PeakSummary p;
    p.peak_i_frac = -1.0;
    for (const auto& d : averaged) {
        const double f = d.i / n;
        if (f > p.peak_i_frac) {
            p.peak_i_frac = f;
            p.peak_day = d.day;
        }
    }
    p.final_size = averaged.back().r / n;
    return p;
}

std::vector<double> ReplicationResult::infected_share() const {
    std::vector<double> out;
    out.reserve(averaged.size());
    for (const auto& d : averaged) out.push_back(d.i / n());
    return out;
}

std::vector<double> ReplicationResult::cumulative_share() const {
    std::vector<double> out;
    out.reserve(averaged.size());
    for (const auto& d : averaged) out.push_back((d.i + d.r) / n());
    return out;
}

ReplicationResult run_replications(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds,
                                   const RunOptions& options) {
    if (seeds.empty()) throw ValidationError("run_replications requires at least one seed");
    ReplicationResult res;
    res.spec = spec;
    res.runs.resize(seeds.size());
    parallel_for(seeds.size(), [&](std::size_t k) { res.runs[k] = run_simulation(spec, seeds[k], options); });
    res.averaged = average_traces(res.runs);
    res.peak = summarize_peak(res.averaged, res.n());
    std::vector<double> fs, pk, pd, r0;
    for (const auto& r : res.runs) {
        fs.push_back(r.final_size);
        pk.push_back(r.peak_i_frac);
        pd.push_back(static_cast<double>(r.peak_day));
        if (r.r0_hat) r0.push_back(*r.r0_hat);
        if (!r.converged) ++res.non_converged;
    }
    res.final_size = mean_sd(fs);
    res.peak_i_frac = mean_sd(pk);
    res.peak_day = mean_sd(pd);
    res.r0_hat = mean_sd(r0);
    return res;
}

}  // namespace spatial_sir
