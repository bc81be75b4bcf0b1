#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "spatial_sir/model.hpp"

using namespace spatial_sir;

TEST_CASE("expected contacts at the calibrated radius") {
    const double oracle = 26600.0 * 3.14159265358979323846 * 0.013 * 0.013;
    CHECK(expected_contacts(26600, 0.013) == doctest::Approx(oracle).epsilon(1e-14));
    CHECK(expected_contacts(26600, 0.013) == doctest::Approx(14.12).epsilon(1e-3));
    CHECK(expected_contacts(0, 0.013) == 0.0);
    CHECK(expected_contacts(26600, 0) == 0.0);
}

TEST_CASE("expected contacts scales linearly in density and quadratically in radius") {
    for (double k : {0.5, 2.0, 4.0}) {
        CHECK(expected_contacts(k * 1000.0, 0.02) == k * expected_contacts(1000.0, 0.02));
        CHECK(expected_contacts(1000.0, k * 0.02) == doctest::Approx(k * k * expected_contacts(1000.0, 0.02)));
    }
}

TEST_CASE("derived quantities at the calibrated parameters") {
    EpidemicParams p;
    Geography g;
    const auto d = derive_quantities(p, g);
    CHECK(d.density == 26600.0);
    CHECK(d.contagion_area == doctest::Approx(std::numbers::pi * 0.013 * 0.013));
    CHECK(d.beta == doctest::Approx(0.054 * 14.1227).epsilon(1e-4));
    CHECK(d.beta == doctest::Approx(0.763).epsilon(1e-3));
    CHECK(d.r0 == doctest::Approx(d.beta / 0.154));
    const auto again = derive_quantities(p, g);
    CHECK(again == d);
}

TEST_CASE("validate_params rejects bad bundles") {
    EpidemicParams p;
    Geography g;
    CHECK_NOTHROW(validate_params(p, g));

    auto bad = p;
    bad.contagion_prob = 1.2;
    CHECK_THROWS_WITH_AS(validate_params(bad, g), doctest::Contains("probability out of range"), ValidationError);

    bad = p;
    bad.initial_infected = p.n_agents + 1;
    CHECK_THROWS_AS(validate_params(bad, g), ValidationError);

    bad = p;
    bad.initial_infected = 0;
    CHECK_NOTHROW(validate_params(bad, g));

    bad = p;
    bad.contagion_radius = 1.0;
    CHECK_THROWS_AS(validate_params(bad, g), ValidationError);

    auto geo = g;
    geo.cluster_anchor = {1.5, 0.5};
    CHECK_THROWS_AS(validate_params(p, geo), ValidationError);
}

TEST_CASE("growth rates") {
    const std::vector<double> a{30, 39, 50.7};
    const auto ga = growth_rates(a);
    REQUIRE(ga.size() == 2);
    CHECK(ga[0].value == doctest::Approx(0.3));
    CHECK(ga[1].value == doctest::Approx(0.3));

    const auto gb = growth_rates(std::vector<double>{5, 5, 5});
    REQUIRE(gb.size() == 2);
    CHECK(gb[0].value == 0.0);

    const auto gc = growth_rates(std::vector<double>{10, 0, 0});
    REQUIRE(gc.size() == 1);
    CHECK(gc[0].value == -1.0);
    CHECK(gc[0].day == 0);

    std::vector<double> geo{7.0};
    for (int t = 0; t < 30; ++t) geo.push_back(geo.back() * 1.125);
    for (const auto& s : growth_rates(geo)) CHECK(s.value == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("enum round trips") {
    for (auto m : {DensityMode::uniform, DensityMode::heterogeneous}) CHECK(parse_density_mode(to_string(m)) == m);
    for (auto m : {OutbreakMode::cluster, OutbreakMode::random, OutbreakMode::symmetric_clusters})
        CHECK(parse_outbreak_mode(to_string(m)) == m);
    for (auto m : {RelocationMode::walk, RelocationMode::daily_uniform_redraw, RelocationMode::frozen})
        CHECK(parse_relocation_mode(to_string(m)) == m);
    CHECK_THROWS_AS(parse_outbreak_mode("nowhere"), ValidationError);
}
