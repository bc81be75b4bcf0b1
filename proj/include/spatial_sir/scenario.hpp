#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spatial_sir/behavior.hpp"
#include "spatial_sir/model.hpp"

namespace spatial_sir {

/// Configuration problems: unknown key, malformed value, bad section.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

std::vector<std::uint64_t> default_seeds(std::uint64_t count);

struct ScenarioSpec {
    std::string scenario_id = "baseline";
    EpidemicParams epidemic;
    Geography geography;
    BehaviorMode behavior;
    std::optional<LockdownPolicy> lockdown;
    std::vector<std::uint64_t> seeds = default_seeds(20);
    std::string notes;
    // Mixed into every random stream. Scenarios with the same salt and seed
    // share random numbers, which makes counterfactual comparisons paired.
    std::uint64_t stream_salt = 0;

    bool operator==(const ScenarioSpec&) const = default;
};

/// Parses the sectioned key = value format. Omitted keys keep the calibrated
/// baseline defaults. Throws ConfigError / ValidationError.
ScenarioSpec parse_scenario(std::string_view text);

/// Canonical text form; parse_scenario(serialize_scenario(s)) == s.
std::string serialize_scenario(const ScenarioSpec& spec);

/// Assigns one dotted key such as "epidemic.contagion_prob".
void set_scenario_value(ScenarioSpec& spec, std::string_view dotted_key, std::string_view value);

void validate_scenario(const ScenarioSpec& spec);

/// FNV-1a of the canonical serialization.
std::uint64_t spec_hash(const ScenarioSpec& spec);

/// "1-20", "1,2,7" or a mix such as "1-3,9".
std::vector<std::uint64_t> parse_seed_list(std::string_view text);
std::string format_seed_list(const std::vector<std::uint64_t>& seeds);

std::string format_double(double v);

}  // namespace spatial_sir
