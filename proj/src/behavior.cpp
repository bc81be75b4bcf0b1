#include "spatial_sir/behavior.hpp"

#include <cmath>
#include <numeric>

#include "spatial_sir/city.hpp"
#include "spatial_sir/contact_grid.hpp"
#include "spatial_sir/rng.hpp"

namespace spatial_sir {

double isolation_share(double i_frac, const BehavioralParams& params) {
    return 1.0 - alpha_response(i_frac, params);
}

void apply_global_behavior(CityState& state, double share) {
    if (!(share >= 0.0 && share <= 1.0)) throw ValidationError("isolation share must lie in [0, 1]");
    const auto n = state.size();
    const auto k = static_cast<std::size_t>(std::floor(share * static_cast<double>(n)));
    std::fill(state.isolated.begin(), state.isolated.end(), 0);
    const auto& order = state.risk_order();
    for (std::size_t r = 0; r < k; ++r) state.isolated[order[r]] = 1;
}

void apply_local_behavior(CityState& state, double radius, const BehavioralParams& params) {
    const std::size_t n = state.size();
    std::vector<std::uint8_t> present(n);
    for (std::size_t i = 0; i < n; ++i) present[i] = state.locked[i] ? 0 : 1;
    ContactGrid grid;
    grid.build(state.positions, present, state.side, radius);

    std::vector<std::uint8_t> next(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!present[i]) continue;
        std::size_t total = 0;
        std::size_t infected = 0;
        grid.for_each_neighbor(state.positions, i, [&](std::size_t j) {
            ++total;
            if (state.health[j] == Health::infected) ++infected;
        });
        if (total == 0 || infected == 0) continue;
        const double share = isolation_share(static_cast<double>(infected) / static_cast<double>(total), params);
        if (share <= 0.0) continue;
        std::size_t above = 0;
        const double own = state.risk_aversion[i];
        grid.for_each_neighbor(state.positions, i, [&](std::size_t j) {
            if (state.risk_aversion[j] > own) ++above;
        });
        const double rank = static_cast<double>(above) / static_cast<double>(total + 1);
        if (rank < share) next[i] = 1;
    }
    state.isolated = std::move(next);
}

bool apply_lockdown(CityState& state, const LockdownPolicy& policy, Rng& rng) {
    if (state.day < policy.start_day || state.lockdown_applied) return false;
    const std::size_t n = state.size();
    const auto k = static_cast<std::size_t>(std::floor(policy.share * static_cast<double>(n)));
    std::fill(state.locked.begin(), state.locked.end(), 0);
    if (policy.selection == LockdownSelection::by_risk_aversion) {
        const auto& order = state.risk_order();
        for (std::size_t r = 0; r < k; ++r) state.locked[order[r]] = 1;
    } else {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(rng.below(n - j));
            std::swap(idx[j], idx[pick]);
            state.locked[idx[j]] = 1;
        }
    }
    state.lockdown_applied = true;
    return true;
}

void validate_behavior(const BehaviorMode& mode) {
    const auto& p = mode.params;
    if (!(p.phi >= 0.0 && p.phi <= 1.0)) throw ValidationError("phi must lie in [0, 1]");
    if (!(p.i_bar > 0.0 && p.i_bar < 1.0)) throw ValidationError("i_bar must lie in (0, 1)");
}

void validate_lockdown(const LockdownPolicy& policy) {
    if (!(policy.share >= 0.0 && policy.share <= 1.0)) throw ValidationError("lockdown share must lie in [0, 1]");
    if (policy.start_day < 0) throw ValidationError("lockdown start_day must be >= 0");
}

std::string to_string(BehaviorKind k) {
    switch (k) {
        case BehaviorKind::none: return "none";
        case BehaviorKind::global: return "global";
        case BehaviorKind::local: return "local";
    }
    return "none";
}

std::string to_string(LockdownSelection s) {
    return s == LockdownSelection::random ? "random" : "by_risk_aversion";
}

BehaviorKind parse_behavior_kind(const std::string& s) {
    if (s == "none") return BehaviorKind::none;
    if (s == "global") return BehaviorKind::global;
    if (s == "local") return BehaviorKind::local;
    throw ValidationError("unknown behavior kind: " + s);
}

LockdownSelection parse_lockdown_selection(const std::string& s) {
    if (s == "random") return LockdownSelection::random;
    if (s == "by_risk_aversion") return LockdownSelection::by_risk_aversion;
    throw ValidationError("unknown lockdown selection: " + s);
}

}  // namespace spatial_sir
