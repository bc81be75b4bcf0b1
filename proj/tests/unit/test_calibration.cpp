#include <cmath>
#include <filesystem>
#include <numbers>

#include "doctest.h"
#include "spatial_sir/calibration.hpp"
#include "spatial_sir/model.hpp"

using namespace spatial_sir;

namespace {

ScenarioSpec tiny_city() {
    ScenarioSpec s;
    s.epidemic.n_agents = 3000;
    s.epidemic.initial_infected = 10;
    s.geography.city_side = std::sqrt(3000.0 / 26600.0);
    return s;
}

SearchConfig tiny_search() {
    SearchConfig c;
    c.grid = 3;
    c.refine_iterations = 1;
    c.seeds = {1, 2};
    return c;
}

}  // namespace

TEST_CASE("recovery probability from the growth identity") {
    // T_inf = 6.5 days: choose g0 so that (r0 - 1) / g0 = 6.5.
    const double r0 = 3.0;
    CHECK(rho_from_growth(r0, (r0 - 1.0) / 6.5) == doctest::Approx(1.0 / 6.5));
    CHECK(std::round(rho_from_growth(r0, (r0 - 1.0) / 6.5) * 1000.0) / 1000.0 == 0.154);
    CHECK(infectious_period(2.5, 0.35) == doctest::Approx(1.5 / 0.35));
    CHECK(infectious_period(2.5, 0.35) == doctest::Approx(4.29).epsilon(1e-3));
    CHECK_THROWS_AS(rho_from_growth(1.0, 0.3), ValidationError);
    CHECK_THROWS_AS(rho_from_growth(2.0, 0.0), ValidationError);
    for (double rho : {0.1, 0.154, 0.3}) {
        for (double r : {1.5, 3.17}) CHECK(rho_from_growth(r, (r - 1.0) * rho) == doctest::Approx(rho).epsilon(1e-15));
    }
}

TEST_CASE("radius for a contact target") {
    const double r = radius_for_contacts(13.5, 26600.0);
    CHECK(r == doctest::Approx(std::sqrt(13.5 / (26600.0 * std::numbers::pi))));
    CHECK(r == doctest::Approx(0.01271).epsilon(1e-3));
    CHECK(std::round(r * 1000.0) / 1000.0 == 0.013);
    CHECK(radius_for_contacts(0.0, 26600.0) == 0.0);
    for (double d : {100.0, 26600.0, 1e6}) {
        CHECK(std::abs(expected_contacts(d, radius_for_contacts(7.0, d)) - 7.0) < 1e-10);
    }
    CHECK_THROWS_AS(radius_for_contacts(13.5, 1.0), ValidationError);
    CHECK_THROWS_AS(radius_for_contacts(13.5, 0.0), ValidationError);
}

TEST_CASE("target and search validation") {
    CHECK_THROWS_AS(validate_target(CalibrationTarget{{0.1, 0.2}, {}}), ValidationError);
    CHECK_THROWS_AS(validate_target(CalibrationTarget{{0.1, 0.2, 0.1, 0.1, 0.1}, {1.0}}), ValidationError);
    SearchConfig s;
    s.pi_lo = 0.1;
    s.pi_hi = 0.05;
    CHECK_THROWS_AS(validate_search(s), ValidationError);
    s = SearchConfig{};
    s.seeds.clear();
    CHECK_THROWS_AS(validate_search(s), ValidationError);
}

TEST_CASE("target CSV round trip") {
    const auto path = std::filesystem::temp_directory_path() / "spatial_sir_target_test.csv";
    CalibrationTarget t{{0.3, 0.25, 0.2, 0.18, 0.1, 0.05}, {}};
    write_target_csv(path, t);
    const auto back = read_target_csv(path);
    CHECK(back.target_growth == t.target_growth);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_target_csv(path), ValidationError);
}

TEST_CASE("fit contract on a small city") {
    const auto city = tiny_city();
    CalibrationTarget zeros{std::vector<double>(35, 0.0), {}};
    const auto res = fit_pi_mu(zeros, city, tiny_search());
    CHECK(res.pi_hat == tiny_search().pi_lo);
    for (const auto& e : res.evaluations) {
        if (e.coarse && !e.extinct) CHECK(res.loss <= e.loss);
    }
    const auto again = fit_pi_mu(zeros, city, tiny_search());
    CHECK(again.loss == res.loss);
    CHECK(again.pi_hat == res.pi_hat);
    CHECK(again.mu_hat == res.mu_hat);
    CHECK(calibration_report_csv(res).rfind("kind,contagion_prob,move_distance,loss,extinct\n", 0) == 0);

    auto dead = city;
    dead.epidemic.initial_infected = 0;
    CHECK_THROWS_WITH_AS(fit_pi_mu(zeros, dead, tiny_search()), "target unreachable in bounds", ValidationError);
}
