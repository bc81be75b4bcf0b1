#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spatial_sir/econometrics.hpp"
#include "spatial_sir/engine.hpp"
#include "spatial_sir/sir.hpp"

namespace spatial_sir {

/// Contact level used when building the mean-field counterpart of a city.
enum class SirContacts {
    analytic,    // d * pi_geo * p^2
    calibrated,  // 13.5 at baseline density, scaled with density
    measured,    // seed-mean day-0 contacts of the spatial run
};

std::string to_string(SirContacts c);
SirContacts parse_sir_contacts(const std::string& s);

inline constexpr double kCalibratedContacts = 13.5;
inline constexpr double kBaselineDensity = 26600.0;

/// Memoizes replication batches by (spec hash, seeds, run options).
class ReplicationCache {
public:
    const ReplicationResult& get(const ScenarioSpec& spec, const std::vector<std::uint64_t>& seeds,
                                 const RunOptions& options);

private:
    std::mutex mutex_;
    std::map<std::string, ReplicationResult> store_;
};

struct PresetOptions {
    std::optional<std::vector<std::uint64_t>> seeds;
    std::optional<int> horizon;
    SirContacts sir_contacts = SirContacts::calibrated;
    ReplicationCache* cache = nullptr;
};

struct Metric {
    std::string scenario;
    std::string name;
    double value = 0.0;
};

struct SirSeries {
    std::string id;
    double n = 0.0;
    std::vector<SirState> states;
    std::optional<BehavioralParams> behavior;
};

struct NamedPanel {
    std::string name;
    PanelDataset panel;
};

struct NamedPrediction {
    std::string name;
    std::vector<DailyPrediction> days;
};

struct PresetOutcome {
    std::string preset;
    std::vector<ReplicationResult> replications;
    std::vector<SirSeries> sir;
    std::vector<Metric> metrics;
    std::vector<NamedPanel> panels;
    std::vector<NamedPrediction> predictions;
    std::optional<TreatmentTable> table;

    /// Throws std::out_of_range when absent.
    double metric(const std::string& scenario, const std::string& name) const;
    const ReplicationResult& replication(const std::string& scenario_id) const;
    const SirSeries& sir_series(const std::string& id) const;
};

const std::vector<std::string>& preset_ids();
bool is_preset(const std::string& id);
std::string preset_description(const std::string& id);

/// Validated spatial scenarios a preset runs (estimation presets list every city).
std::vector<ScenarioSpec> preset_scenarios(const std::string& id, const PresetOptions& options = {});

PresetOutcome run_preset(const std::string& id, const PresetOptions& options = {});

/// Mean-field counterpart of a spatial scenario with linear hazard.
SirParams sir_counterpart(const ScenarioSpec& spec, SirContacts contacts, double measured_contacts = 0.0);

/// Largest absolute difference between two series over the longer length,
/// continuing the shorter one at its last value.
double sup_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Standard per-scenario metrics of a replication batch.
std::vector<Metric> replication_metrics(const ReplicationResult& rep);

std::vector<double> sir_infected_share(const SirSeries& s);

}  // namespace spatial_sir
