#include <cmath>

#include "doctest.h"
#include "spatial_sir/behavior.hpp"
#include "spatial_sir/city.hpp"
#include "spatial_sir/engine.hpp"

using namespace spatial_sir;

namespace {

CityState random_city(std::size_t n, std::uint64_t seed) {
    Geography g;
    Rng rng(seed, Subsystem::placement);
    auto pos = place_agents(g, static_cast<Count>(n), rng);
    Rng risk(seed, Subsystem::risk);
    std::vector<double> r(n);
    for (auto& v : r) v = risk.uniform();
    return CityState(1.0, std::move(pos), std::vector<Health>(n, Health::susceptible), std::move(r));
}

}  // namespace

TEST_CASE("isolation share") {
    BehavioralParams b;
    CHECK(isolation_share(0.005, b) == 0.0);
    CHECK(isolation_share(0.01, b) == 0.0);
    CHECK(isolation_share(0.1, b) == doctest::Approx(1.0 - std::pow(0.1, 0.12)));
    CHECK(isolation_share(0.1, b) == doctest::Approx(0.2414).epsilon(1e-3));
    CHECK(isolation_share(0.7, BehavioralParams{1.0, 0.01}) == 0.0);
}

TEST_CASE("global behavior isolates the most risk-averse, nested in the share") {
    auto state = random_city(2000, 1);
    apply_global_behavior(state, 0.0);
    CHECK(std::count(state.isolated.begin(), state.isolated.end(), 1) == 0);
    apply_global_behavior(state, 1.0);
    CHECK(std::count(state.isolated.begin(), state.isolated.end(), 1) == 2000);

    apply_global_behavior(state, 0.1);
    const auto low = state.isolated;
    CHECK(std::count(low.begin(), low.end(), 1) == 200);
    double min_isolated = 1.0, max_free = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (low[i]) min_isolated = std::min(min_isolated, state.risk_aversion[i]);
        else max_free = std::max(max_free, state.risk_aversion[i]);
    }
    CHECK(min_isolated > max_free);
    apply_global_behavior(state, 0.3);
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (low[i]) CHECK(state.isolated[i] == 1);
    }
}

TEST_CASE("local behavior follows the neighborhood percentile rule") {
    const double r = 0.013;
    std::vector<Point> pos{{0.5, 0.5}};
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * 3.14159265358979 * k / 5.0;
        pos.push_back({0.5 + 0.005 * std::cos(a), 0.5 + 0.005 * std::sin(a)});
    }
    pos.push_back({0.1, 0.1});
    std::vector<Health> health(7, Health::infected);
    health[0] = Health::susceptible;
    health[6] = Health::susceptible;
    const double x = isolation_share(1.0, BehavioralParams{});
    CHECK(x == doctest::Approx(1.0 - std::pow(0.01, 0.12)));
    CHECK(x == doctest::Approx(0.4245).epsilon(1e-3));

    // Two neighbors above the centre agent: rank 2/6 < 0.4245.
    std::vector<double> risk{0.5, 0.9, 0.8, 0.1, 0.2, 0.3, 0.99};
    CityState a(1.0, pos, health, risk);
    apply_local_behavior(a, r, BehavioralParams{});
    CHECK(a.isolated[0] == 1);
    CHECK(a.isolated[6] == 0);

    // Three above: rank 3/6 is not below the share.
    risk[3] = 0.7;
    CityState b(1.0, pos, health, risk);
    apply_local_behavior(b, r, BehavioralParams{});
    CHECK(b.isolated[0] == 0);

    CityState c(1.0, pos, std::vector<Health>(7, Health::susceptible), risk);
    apply_local_behavior(c, r, BehavioralParams{});
    CHECK(std::count(c.isolated.begin(), c.isolated.end(), 1) == 0);

    CityState d(1.0, pos, health, risk);
    apply_local_behavior(d, r, BehavioralParams{});
    CHECK(d.isolated == b.isolated);
}

TEST_CASE("lockdown selects once and removes agents from contacts") {
    auto state = random_city(4000, 2);
    Rng rng(2, Subsystem::lockdown);
    const LockdownPolicy p{0.25, 20, LockdownSelection::random};
    state.day = 19;
    CHECK_FALSE(apply_lockdown(state, p, rng));
    CHECK(std::count(state.locked.begin(), state.locked.end(), 1) == 0);
    state.day = 20;
    CHECK(apply_lockdown(state, p, rng));
    CHECK(std::count(state.locked.begin(), state.locked.end(), 1) == 1000);
    const auto first = state.locked;
    state.day = 35;
    CHECK_FALSE(apply_lockdown(state, p, rng));
    CHECK(state.locked == first);

    const auto nb = contact_sets(state, 0.05);
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.locked[i]) CHECK(nb[i].empty());
        for (auto j : nb[i]) CHECK(state.locked[j] == 0);
    }

    auto risky = random_city(4000, 3);
    risky.day = 20;
    apply_lockdown(risky, LockdownPolicy{0.5, 0, LockdownSelection::by_risk_aversion}, rng);
    std::size_t top = 0;
    for (std::uint32_t k = 0; k < 2000; ++k) top += risky.locked[risky.risk_order()[k]];
    CHECK(top == 2000);
}

TEST_CASE("validation of behavior and lockdown settings") {
    CHECK_THROWS_AS(validate_lockdown(LockdownPolicy{1.5, 20, LockdownSelection::random}), ValidationError);
    CHECK_THROWS_AS(validate_lockdown(LockdownPolicy{0.25, -1, LockdownSelection::random}), ValidationError);
    BehaviorMode m;
    m.kind = BehaviorKind::global;
    m.params.phi = 1.5;
    CHECK_THROWS_AS(validate_behavior(m), ValidationError);
    CHECK(parse_behavior_kind(to_string(BehaviorKind::local)) == BehaviorKind::local);
    CHECK(parse_lockdown_selection("by_risk_aversion") == LockdownSelection::by_risk_aversion);
}

TEST_CASE("behavioral city has a lower peak than the plain city") {
    ScenarioSpec s;
    s.epidemic.n_agents = 6650;
    s.geography.city_side = 0.5;
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    RunOptions fast;
    fast.diagnostics = false;
    const auto plain = run_replications(s, seeds, fast);
    s.behavior.kind = BehaviorKind::global;
    const auto beh = run_replications(s, seeds, fast);
    CHECK(beh.peak.peak_i_frac < plain.peak.peak_i_frac);
    CHECK(beh.peak.final_size <= plain.peak.final_size + 1e-12);
}
