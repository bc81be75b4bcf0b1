#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "spatial_sir/sir.hpp"

using namespace spatial_sir;

namespace {

// Independent root of x = 1 - exp(-r0 x) by fixed-point iteration.
double final_size_oracle(double r0) {
    double x = 0.999;
    for (int k = 0; k < 100000; ++k) x = 1.0 - std::exp(-r0 * x);
    return x;
}

}  // namespace

TEST_CASE("infection probability") {
    CHECK(infection_probability(0.054, 13.5, 1.0) == doctest::Approx(1.0 - std::pow(0.946, 13.5)));
    CHECK(infection_probability(0.054, 13.5, 1.0) == doctest::Approx(0.5274).epsilon(1e-4));
    CHECK(infection_probability(0.3, 7.0, 0.0) == 0.0);
    CHECK(infection_probability(0.2, 1.0, 0.4) == doctest::Approx(0.08));
    CHECK(infection_probability(0.2, 5.0, 0.4, HazardForm::linear) == doctest::Approx(0.4));
    CHECK_THROWS_AS(infection_probability(0.9, 2.0, 1.2), ValidationError);
}

TEST_CASE("final size root") {
    CHECK(final_size(1.0) == 0.0);
    CHECK(final_size(0.5) == 0.0);
    CHECK(final_size(2.0) == doctest::Approx(0.79681).epsilon(1e-5));
    CHECK(final_size(3.615) == doctest::Approx(0.970).epsilon(1e-3));
    for (double r0 : {1.5, 2.0, 3.0, 4.73}) {
        const double x = final_size(r0);
        CHECK(std::abs(x - final_size_oracle(r0)) < 1e-9);
        CHECK(std::abs(x + std::log(1.0 - x) / r0) < 1e-9);
    }
}

TEST_CASE("peak fraction formula") {
    CHECK(peak_fraction(1.0) == doctest::Approx(0.0));
    CHECK(peak_fraction(2.0) == doctest::Approx(0.15343).epsilon(1e-5));
    CHECK(peak_fraction(std::numbers::e) == doctest::Approx(1.0 - 2.0 / std::numbers::e));
    CHECK(peak_fraction(std::numbers::e) == doctest::Approx(0.26424).epsilon(1e-5));
    CHECK_THROWS_AS(peak_fraction(0.9), ValidationError);
}

TEST_CASE("behavioral response") {
    BehavioralParams b;
    CHECK(alpha_response(0.005, b) == 1.0);
    CHECK(alpha_response(0.1, b) == doctest::Approx(std::pow(0.1, 0.12)));
    CHECK(alpha_response(0.1, b) == doctest::Approx(0.7586).epsilon(1e-4));
    CHECK(alpha_response(b.i_bar, b) == 1.0);
    CHECK(alpha_response(b.i_bar * (1 + 1e-12), b) == doctest::Approx(1.0));
    BehavioralParams flat{1.0, 0.01};
    CHECK(alpha_response(0.6, flat) == 1.0);
    double prev = 1.0;
    for (double i = 0.0; i <= 1.0; i += 0.01) {
        const double a = alpha_response(i, b);
        CHECK(a <= prev);
        prev = a;
    }
}

TEST_CASE("pure decay when beta is zero") {
    const auto traj = simulate_sir(SirParams::linear(0.0, 0.154, 1000.0), 100.0, 40);
    REQUIRE(traj.size() == 41);
    for (const auto& st : traj) CHECK(st.i == doctest::Approx(100.0 * std::pow(0.846, st.day)));
}

TEST_CASE("conservation and day-0 growth") {
    const auto p = SirParams::linear(0.054 * 13.5, 0.154, 26600.0);
    const auto traj = simulate_sir(p, 0.266, 400);
    for (const auto& st : traj) {
        CHECK(std::abs(st.s + st.i + st.r - 26600.0) < 1e-8);
        CHECK(st.s >= 0.0);
        CHECK(st.i >= 0.0);
    }
    const double g0 = traj[1].i / traj[0].i - 1.0;
    CHECK(std::abs(g0 - (p.beta - p.rho)) < 1e-5);
}

TEST_CASE("simulated final size converges to the root as the daily rates shrink") {
    const double n = 1e6;
    for (double r0 : {1.5, 2.0, 3.0, 4.73}) {
        double prev = 1.0;
        for (double rho : {0.154, 0.05, 0.01}) {
            const auto traj = simulate_sir(SirParams::linear(r0 * rho, rho, n), 1e-5 * n, 40000);
            const double gap = traj.back().r / n - final_size(r0);
            // The one-day step infects slightly more than the flow does.
            CHECK(gap > 0.0);
            CHECK(gap < prev);
            prev = gap;
        }
        CHECK(prev < 1e-3);
    }
}

TEST_CASE("stationary state does not depend on I0") {
    const double n = 1e6;
    for (double rho : {0.154, 0.01}) {
        const auto p = SirParams::linear(2.5 * rho, rho, n);
        std::vector<double> finals;
        for (double i0 : {1.0, 10.0, 100.0}) finals.push_back(simulate_sir(p, i0, 40000).back().r / n);
        CHECK(std::abs(finals[0] - finals[2]) < 1e-3);
        CHECK(std::abs(finals[1] - finals[2]) < 1e-3);
        if (rho == 0.01) CHECK(std::abs(finals[0] - final_size(2.5)) < 1e-3);
    }
}

TEST_CASE("peak approaches the closed form as I0/N vanishes") {
    // The closed form is the continuous-time limit: it is reached when the
    // daily rates are small, and the one-day step overshoots it otherwise.
    const double n = 1e7;
    for (double r0 : {1.5, 2.0, 3.0, 4.73}) {
        const auto p = SirParams::linear(r0 * 0.01, 0.01, n);
        const auto a = summarize_sir(simulate_sir(p, 1e-6 * n, 20000));
        const auto b = summarize_sir(simulate_sir(p, 1e-5 * n, 20000));
        CHECK(std::abs(a.peak_i_frac - b.peak_i_frac) < 1e-3);
        CHECK(std::abs(a.peak_i_frac - peak_fraction(r0)) < 5e-3);
    }
    double prev = 1.0;
    for (double rho : {0.154, 0.05, 0.01}) {
        const auto p = SirParams::linear(3.0 * rho, rho, n);
        const double gap = summarize_sir(simulate_sir(p, 1e-6 * n, 40000)).peak_i_frac - peak_fraction(3.0);
        CHECK(gap > 0.0);
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("(c, pi) invariance holds bit for bit under the linear hazard") {
    const double c = 13.5;
    const double pi = 0.054;
    const auto ref = simulate_sir(SirParams::linear(pi * c, 0.154, 26600.0), 30.0, 300);
    for (double k : {2.0, 3.0, 4.0, 6.0}) {
        const auto alt = simulate_sir(SirParams::linear((k * pi) * (c / k), 0.154, 26600.0), 30.0, 300);
        REQUIRE(alt.size() == ref.size());
        for (std::size_t t = 0; t < ref.size(); ++t) {
            CHECK(alt[t].s == ref[t].s);
            CHECK(alt[t].i == ref[t].i);
        }
    }
    // The per-contact hazard does not share the invariance.
    const auto d1 = simulate_sir(SirParams::discrete_contact(pi, c, 0.154, 26600.0), 30.0, 300);
    const auto d6 = simulate_sir(SirParams::discrete_contact(6 * pi, c / 6, 0.154, 26600.0), 30.0, 300);
    double gap = 0.0;
    for (std::size_t t = 0; t < d1.size(); ++t) gap = std::max(gap, std::abs(d1[t].i - d6[t].i));
    CHECK(gap > 1.0);
}

TEST_CASE("behavior lowers the peak and lockdown scales the hazard") {
    const auto p = SirParams::linear(0.054 * 13.5, 0.154, 26600.0);
    const auto plain = summarize_sir(simulate_sir(p, 30.0, 600));
    const auto beh = summarize_sir(simulate_sir(p, 30.0, 600, BehavioralParams{}));
    CHECK(beh.peak_i_frac < plain.peak_i_frac);
    CHECK(beh.final_size <= plain.final_size);

    const auto open = simulate_sir(p, 30.0, 40);
    const auto shut = simulate_sir(p, 30.0, 40, std::nullopt, SirLockdown{0.25, 20});
    for (int t = 0; t < 20; ++t) CHECK(open[t].i == shut[t].i);
    // Infections arriving on the start day already use 0.75 of the hazard.
    const double expected = shut[19].s * 0.75 * p.beta * shut[19].i / p.n;
    CHECK(shut[19].s - shut[20].s == doctest::Approx(expected));
}
