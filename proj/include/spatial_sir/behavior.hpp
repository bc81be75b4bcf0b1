#pragma once

#include "spatial_sir/sir.hpp"

namespace spatial_sir {

class CityState;
class ContactGrid;
class Rng;

enum class BehaviorKind { none, global, local };

struct BehaviorMode {
    BehaviorKind kind = BehaviorKind::none;
    BehavioralParams params;
    bool operator==(const BehaviorMode&) const = default;
};

enum class LockdownSelection { random, by_risk_aversion };

struct LockdownPolicy {
    double share = 0.25;
    int start_day = 20;
    LockdownSelection selection = LockdownSelection::random;
    bool operator==(const LockdownPolicy&) const = default;
};

/// Share of the population that refrains from contacts: 1 - alpha(i_frac).
double isolation_share(double i_frac, const BehavioralParams& params);

/// Isolates the floor(share * N) most risk-averse agents; everyone else is released.
void apply_global_behavior(CityState& state, double share);

/// Neighborhood-driven isolation. Each agent looks at the non-locked agents
/// within `radius`, computes the local infected fraction and isolates when its
/// risk-aversion rank (from the top) among itself and its neighbors falls
/// strictly below the implied isolation share.
void apply_local_behavior(CityState& state, double radius, const BehavioralParams& params);

/// Locks floor(share * N) agents on the first call with day >= start_day and
/// keeps that set fixed afterwards. Returns true when the set changed.
bool apply_lockdown(CityState& state, const LockdownPolicy& policy, Rng& rng);

void validate_behavior(const BehaviorMode& mode);
void validate_lockdown(const LockdownPolicy& policy);

std::string to_string(BehaviorKind k);
std::string to_string(LockdownSelection s);
BehaviorKind parse_behavior_kind(const std::string& s);
LockdownSelection parse_lockdown_selection(const std::string& s);

}  // namespace spatial_sir
