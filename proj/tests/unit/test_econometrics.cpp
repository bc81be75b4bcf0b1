#include <cmath>

#include "doctest.h"
#include "spatial_sir/econometrics.hpp"
#include "spatial_sir/sir.hpp"

using namespace spatial_sir;

namespace {

// Independent solve of (X'X) b = X'y through an LDLT factorization.
Eigen::VectorXd normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::VectorXd xty = x.transpose() * y;
    return xtx.ldlt().solve(xty);
}

PanelRow row(int city, int day, bool treated, double y) {
    PanelRow r;
    r.city_id = city;
    r.day = day;
    r.treated = treated;
    r.n = 1000;
    r.i_frac = y;
    r.i_count = static_cast<Count>(std::llround(y * 1000));
    r.contacts = y;
    r.growth = y;
    return r;
}

// nu + eta_i + gamma_t + delta * treated (+ optional noise), staggered adoption.
PanelDataset additive_panel(double delta, double noise, std::uint64_t seed, int cities = 8, int days = 12) {
    Rng rng(seed, Subsystem::placement);
    std::vector<double> eta(cities), gamma(days);
    for (auto& e : eta) e = rng.normal();
    for (auto& g : gamma) g = rng.normal();
    PanelDataset p;
    for (int c = 0; c < cities; ++c) {
        const int start = c % 3 == 0 ? days + 1 : 3 + c % 5;
        for (int t = 0; t < days; ++t) {
            const bool tr = t >= start;
            p.push_back(row(c, t, tr, 0.7 + eta[c] + gamma[t] + delta * (tr ? 1.0 : 0.0) + noise * rng.normal()));
        }
    }
    return p;
}

}  // namespace

TEST_CASE("ols exact fit and identities") {
    Eigen::MatrixXd x(6, 2);
    Eigen::VectorXd y(6);
    for (int i = 0; i < 6; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = i * 0.5;
        y[i] = 2.0 * x(i, 1) + 1.0;
    }
    const auto r = ols(x, y, {"intercept", "x"});
    CHECK(std::abs(r.coef("x") - 2.0) < 1e-10);
    CHECK(std::abs(r.coef("intercept") - 1.0) < 1e-10);
    CHECK(r.r_squared == doctest::Approx(1.0));
    CHECK_THROWS_AS(r.coef("missing"), std::out_of_range);
}

TEST_CASE("ols matches the normal-equations oracle") {
    Rng rng(42, Subsystem::placement);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::MatrixXd x(100, 5);
        Eigen::VectorXd y(100);
        for (int i = 0; i < 100; ++i) {
            for (int j = 0; j < 5; ++j) x(i, j) = rng.normal();
            y[i] = rng.normal();
        }
        const auto r = ols(x, y, {"a", "b", "c", "d", "e"});
        const Eigen::VectorXd oracle = normal_equations(x, y);
        CHECK((r.coefficients - oracle).cwiseAbs().maxCoeff() < 1e-8);
        CHECK((r.fitted + r.residuals - y).cwiseAbs().maxCoeff() < 1e-10);
        for (int j = 0; j < 5; ++j) CHECK(std::abs(x.col(j).dot(r.residuals)) < 1e-8 * x.col(j).norm() * y.norm());
        // Classical errors: sqrt(sigma^2 diag((X'X)^-1)).
        const double s2 = r.residuals.squaredNorm() / 95.0;
        const Eigen::MatrixXd inv = (x.transpose() * x).inverse();
        for (int j = 0; j < 5; ++j) CHECK(r.std_errors[j] == doctest::Approx(std::sqrt(s2 * inv(j, j))));
    }
}

TEST_CASE("ols reports collinear columns") {
    Eigen::MatrixXd x(10, 3);
    Eigen::VectorXd y(10);
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = 1.0;
        x(i, 1) = i;
        x(i, 2) = 2.0 * i;
        y[i] = i;
    }
    CHECK_THROWS_WITH_AS(ols(x, y, {"intercept", "x", "x_twice"}), doctest::Contains("collinear"), ValidationError);
    CHECK_THROWS_AS(ols(x.topRows(2), y.head(2), {"intercept", "x", "x_twice"}), ValidationError);
}

TEST_CASE("beta regression recovers the mean-field parameters") {
    PanelDataset panel;
    int city = 0;
    for (double density : {0.5, 1.0, 1.5}) {
        const double beta = 0.6 * density;
        const auto traj = simulate_sir(SirParams::linear(beta, 0.154, 26600.0), 30.0, 80);
        for (int t = 0; t < 80; ++t) {
            PanelRow r;
            r.city_id = city;
            r.day = t;
            r.density = density;
            r.n = 26600;
            r.s_frac = traj[t].s / 26600.0;
            r.i_frac = traj[t].i / 26600.0;
            r.growth = traj[t + 1].i / traj[t].i - 1.0;
            panel.push_back(r);
        }
        ++city;
    }
    const auto est = estimate_beta_by_density(panel);
    REQUIRE(est.size() == 3);
    for (const auto& [density, e] : est) {
        CHECK(std::abs(e.beta_hat - 0.6 * density) < 1e-6);
        CHECK(std::abs(e.intercept + 0.154) < 1e-6);
    }
    PanelDataset few(panel.begin(), panel.begin() + 5);
    CHECK_THROWS_AS(estimate_beta_by_density(few), ValidationError);
}

TEST_CASE("synthetic additive DiD recovers delta exactly") {
    const auto panel = additive_panel(-0.3, 0.0, 7);
    for (auto outcome : {DidOutcome::infected_frac, DidOutcome::contacts}) {
        DidSpec spec;
        spec.outcome = outcome;
        CHECK(std::abs(did_estimate(panel, spec).delta() + 0.3) < 1e-10);
    }
}

TEST_CASE("two-way dummies equal the within estimator and ignore the reference choice") {
    const auto panel = additive_panel(0.15, 0.4, 9);
    DidSpec spec;
    spec.outcome = DidOutcome::infected_frac;
    const double dummy = did_estimate(panel, spec).delta();
    CHECK(std::abs(dummy - within_estimate(panel, DidOutcome::infected_frac)) < 1e-8);
    spec.reference_city = 5;
    spec.reference_day = 7;
    CHECK(std::abs(did_estimate(panel, spec).delta() - dummy) < 1e-10);
    spec.reference_city = 99;
    CHECK_THROWS_AS(did_estimate(panel, spec), ValidationError);
}

TEST_CASE("ATE identity and daily predictions") {
    const auto panel = additive_panel(-0.2, 0.3, 11);
    DidSpec spec;
    spec.outcome = DidOutcome::infected_frac;
    const auto res = did_estimate(panel, spec);
    double fit = 0.0, act = 0.0;
    for (std::size_t r = 0; r < res.rows.size(); ++r) {
        if (!panel[res.rows[r]].treated) continue;
        fit += res.regression.fitted[static_cast<Eigen::Index>(r)];
        act += res.outcome[static_cast<Eigen::Index>(r)];
    }
    CHECK(std::abs(fit - act) < 1e-8);
    const auto daily = did_predict_daily(res, panel);
    CHECK(daily.size() == 12);
    double f = 0.0, a = 0.0;
    for (const auto& d : daily) {
        f += d.mean_fitted;
        a += d.mean_actual;
    }
    // City effects make mean residuals vanish city by city.
    CHECK(std::abs(f - a) < 1e-8);
}

TEST_CASE("DiD error conditions") {
    PanelDataset none;
    for (int c = 0; c < 3; ++c) {
        for (int t = 0; t < 4; ++t) none.push_back(row(c, t, false, 0.1 * t + c));
    }
    CHECK_THROWS_WITH_AS(did_estimate(none, DidSpec{}), doctest::Contains("no variation in treated"), ValidationError);
    PanelDataset one;
    for (int t = 0; t < 4; ++t) one.push_back(row(0, t, t > 1, 0.1 * t));
    CHECK_THROWS_AS(did_estimate(one, DidSpec{}), ValidationError);

    // A regressor constant within cities is absorbed by the city effects.
    auto panel = additive_panel(-0.3, 0.1, 3);
    for (auto& r : panel) r.density = 0.5 + 0.1 * r.city_id;
    DidSpec spec;
    spec.extra_regressors = {DidRegressor::density};
    CHECK_THROWS_WITH_AS(did_estimate(panel, spec), doctest::Contains("collinear"), ValidationError);
    spec.extra_regressors = {DidRegressor::density_x_treated};
    CHECK(did_estimate(panel, spec).interaction().has_value());
}

TEST_CASE("panel construction") {
    CHECK(build_panel(std::vector<CityRun>{}).empty());
    RunTrace t;
    t.n = 100;
    for (int d = 0; d < 6; ++d) {
        DayRecord r;
        r.day = d;
        r.i = d < 4 ? 10 - 3 * d : 0;
        r.s = 80;
        r.r = 100 - 80 - r.i;
        r.locked_share = d >= 2 ? 0.25 : 0.0;
        t.days.push_back(r);
    }
    std::vector<CityRun> cities{{0, 1.0, 2, t}, {1, 0.5, std::nullopt, t}};
    const auto panel = build_panel(cities, 10);
    CHECK(panel.size() == 20);
    CHECK(panel[1].treated == false);
    CHECK(panel[2].treated == true);
    CHECK(panel[2].contacts == 0.75);
    CHECK(panel[12].treated == false);
    CHECK(panel[3].growth.has_value());
    CHECK(*panel[3].growth == -1.0);
    CHECK_FALSE(panel[4].growth.has_value());
    CHECK(panel[9].i_count == 0);
    cities[1].city_id = 0;
    CHECK_THROWS_AS(build_panel(cities, 10), ValidationError);
}

TEST_CASE("DiD spec text") {
    const auto s = parse_did_spec("outcome = growth; extra = density_x_treated\n# comment\nreference_city=3");
    CHECK(s.outcome == DidOutcome::growth);
    REQUIRE(s.extra_regressors.size() == 1);
    CHECK(s.extra_regressors[0] == DidRegressor::density_x_treated);
    CHECK(s.reference_city == 3);
    CHECK_THROWS_AS(parse_did_spec("outcome=deaths"), ValidationError);
    CHECK_THROWS_AS(parse_did_spec("weights=1"), ValidationError);
}

TEST_CASE("treatment table needs every catalog cell") {
    std::vector<CatalogEntry> catalog;
    CatalogEntry e;
    e.trace.n = 10;
    e.trace.days.resize(3);
    catalog.push_back(e);
    CHECK_THROWS_WITH_AS(treatment_table(catalog), doctest::Contains("missing catalog cell"), ValidationError);
}
