#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spatial_sir/city.hpp"
#include "spatial_sir/scenario.hpp"

namespace spatial_sir {

struct DayRecord {
    int day = 0;
    Count s = 0;
    Count i = 0;
    Count r = 0;
    // Mean number of contacts among participating agents.
    double avg_contacts = 0.0;
    // Share of all agents isolated and not locked (locked status dominates).
    double isolation_share = 0.0;
    double locked_share = 0.0;
    Count new_infections = 0;
    // Realized hazard of start-of-day susceptibles divided by beta.
    std::optional<double> lambda_hat;
};

/// Infection history per agent. Outbreak agents carry infected_on = 0 and no infector.
struct Attribution {
    std::vector<int> infected_on;
    std::vector<std::int64_t> infector;
};

struct RunTrace {
    std::string scenario_id;
    std::uint64_t seed = 0;
    Count n = 0;
    std::vector<DayRecord> days;
    double final_size = 0.0;
    double peak_i_frac = 0.0;
    int peak_day = 0;
    std::optional<double> r0_hat;
    // False when the horizon was reached with infected agents left.
    bool converged = true;
    std::optional<Attribution> attribution;
};

struct RunOptions {
    // Contact counting over all pairs; switched off by the calibration loop.
    bool diagnostics = true;
    bool keep_attribution = false;
    // Stop after this day even if infections persist (panel presets use 80).
    std::optional<int> max_day;
};

/// Builds the day-0 city: placement, outbreak, risk draws, day-0 behavior flags.
CityState initial_city(const ScenarioSpec& spec, RngStreams& streams);

/// Daily order: move, behavior and policy flags, transmission, recovery.
RunTrace run_simulation(const ScenarioSpec& spec, std::uint64_t seed, const RunOptions& options = {});

/// Mean number of infections attributed to agents infected on days 0-4.
/// Throws ValidationError("empty cohort") when nobody was infected in that window.
double estimate_r0(const Attribution& attribution);

struct MeanDay {
    int day = 0;
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
    double avg_contacts = 0.0;
    double isolation_share = 0.0;
    double locked_share = 0.0;
    double new_infections = 0.0;
    std::optional<double> lambda_hat;
};

struct PeakSummary {
    double peak_i_frac = 0.0;
    int peak_day = 0;
    double final_size = 0.0;
};

struct Stat {
    double mean = 0.0;
    double sd = 0.0;
    std::size_t count = 0;
};

Stat mean_sd(std::span<const double> values);

/// Day-wise mean; shorter traces are continued in their final steady state.
std::vector<MeanDay> average_traces(std::span<const RunTrace> runs);

/// Argmax of mean I/N (earliest day on ties) plus final R/N.
PeakSummary summarize_peak(std::span<const MeanDay> averaged, double n);

struct ReplicationResult {
    ScenarioSpec spec;
    std::vector<RunTrace> runs;
    std::vector<MeanDay> averaged;
    PeakSummary peak;
    Stat final_size;
    Stat peak_i_frac;
    Stat peak_day;
    Stat r0_hat;
    int non_converged = 0;

    double n() const { return static_cast<double>(spec.epidemic.n_agents); }
    /// Mean infected share per day.
    std::vector<double> infected_share() const;
    /// Mean cumulative infected share (I + R) / N per day.
    std::vector<double> cumulative_share() const;
};

ReplicationResult run_replications(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds,
                                   const RunOptions& options = {});

inline ReplicationResult run_replications(const ScenarioSpec& spec, const RunOptions& options = {}) {
    return run_replications(spec, spec.seeds, options);
}

}  // namespace spatial_sir
