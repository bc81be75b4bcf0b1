#include "spatial_sir/econometrics.hpp"
#include "spatial_sir/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spatial_sir {

PanelDataset build_panel(std::span<const CityRun> cities, int cutoff) {
    PanelDataset panel;
    std::set<int> seen;
    for (const auto& city : cities) {
        if (!seen.insert(city.city_id).second)
            throw ValidationError("duplicate (city, day) rows for city " + std::to_string(city.city_id));
        const auto& days = city.trace.days;
        if (days.empty()) continue;
        auto at = [&](int t) -> const DayRecord& {
            return static_cast<std::size_t>(t) < days.size() ? days[static_cast<std::size_t>(t)] : days.back();
        };
        const auto n = city.trace.n;
        for (int t = 0; t < cutoff; ++t) {
            const DayRecord& d = at(t);
            PanelRow row;
            row.city_id = city.city_id;
            row.day = t;
            row.density = city.density;
            row.n = n;
            row.treated = city.treatment_day && t >= *city.treatment_day;
            row.i_count = d.i;
            row.s_count = d.s;
            row.r_count = d.r;
            row.i_frac = static_cast<double>(d.i) / static_cast<double>(n);
            row.s_frac = static_cast<double>(d.s) / static_cast<double>(n);
            if (d.i > 0) {
                const DayRecord& next = at(t + 1);
                row.growth = static_cast<double>(next.i - d.i) / static_cast<double>(d.i);
            }
            // Beyond the end of a trace nobody is isolated any more.
            const bool live = static_cast<std::size_t>(t) < days.size();
            const double iso = live ? d.isolation_share : 0.0;
            row.contacts = 1.0 - iso - d.locked_share;
            panel.push_back(row);
        }
    }
    return panel;
}

double RegressionResult::coef(const std::string& name) const {
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (names[k] == name) return coefficients[static_cast<Eigen::Index>(k)];
    }
    throw std::out_of_range("no coefficient named " + name);
}

RegressionResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names) {
    const auto n = x.rows();
    const auto p = x.cols();
    if (static_cast<Eigen::Index>(names.size()) != p) throw ValidationError("ols: names do not match columns");
    if (y.size() != n) throw ValidationError("ols: response length does not match design rows");
    if (n < p) throw ValidationError("ols: fewer rows than columns");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
        std::string cols;
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = qr.rank(); k < p; ++k) {
            if (!cols.empty()) cols += ", ";
            cols += names[static_cast<std::size_t>(perm[k])];
        }
        throw ValidationError("rank deficient design; collinear columns: " + cols);
    }

    RegressionResult res;
    res.names = std::move(names);
    res.coefficients = qr.solve(y);
    res.fitted = x * res.coefficients;
    res.residuals = y - res.fitted;

    const double rss = res.residuals.squaredNorm();
    const double mean = y.mean();
    const double tss = (y.array() - mean).square().sum();
    res.r_squared = tss > 0.0 ? 1.0 - rss / tss : 1.0;

    // Classical errors from (R^T R)^{-1} with R the triangular factor.
    res.std_errors = Eigen::VectorXd::Zero(p);
    if (n > p) {
        const double sigma2 = rss / static_cast<double>(n - p);
        const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
        const Eigen::MatrixXd rinv =
            r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
        const Eigen::VectorXd diag = (rinv * rinv.transpose()).diagonal();
        const auto& perm = qr.colsPermutation().indices();
        for (Eigen::Index k = 0; k < p; ++k) res.std_errors[perm[k]] = std::sqrt(sigma2 * diag[k]);
    }
    return res;
}

std::map<double, BetaEstimate> estimate_beta_by_density(const PanelDataset& panel) {
    std::map<double, std::vector<const PanelRow*>> groups;
    for (const auto& row : panel) {
        if (!row.growth) continue;
        groups[std::round(row.density * 1e6) / 1e6].push_back(&row);
    }
    std::map<double, BetaEstimate> out;
    for (const auto& [density, rows] : groups) {
        if (rows.size() < 10)
            throw ValidationError("fewer than 10 usable rows at density " + format_double(density));
        Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), 2);
        Eigen::VectorXd y(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const auto r = static_cast<Eigen::Index>(k);
            x(r, 0) = 1.0;
            x(r, 1) = rows[k]->s_frac;
            y[r] = *rows[k]->growth;
        }
        const auto fit = ols(x, y, {"intercept", "s_frac"});
        out[density] = {fit.coef("s_frac"), fit.coef("intercept"), rows.size()};
    }
    return out;
}

double outcome_value(const PanelRow& row, DidOutcome outcome) {
    switch (outcome) {
        case DidOutcome::infected: return static_cast<double>(row.i_count);
        case DidOutcome::infected_frac: return row.i_frac;
        case DidOutcome::contacts: return row.contacts;
        case DidOutcome::growth: return row.growth.value_or(0.0);
    }
    return 0.0;
}

std::optional<double> DidResult::interaction() const {
    for (std::size_t k = 0; k < regression.names.size(); ++k) {
        if (regression.names[k] == "density_x_treated")
            return regression.coefficients[static_cast<Eigen::Index>(k)];
    }
    return std::nullopt;
}

DidResult did_estimate(const PanelDataset& panel, const DidSpec& spec) {
    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < panel.size(); ++k) {
        if (spec.outcome == DidOutcome::growth && !panel[k].growth) continue;
        rows.push_back(k);
    }
    std::set<int> cities;
    std::set<int> days;
    bool any_treated = false;
    bool any_untreated = false;
    for (auto k : rows) {
        cities.insert(panel[k].city_id);
        days.insert(panel[k].day);
        (panel[k].treated ? any_treated : any_untreated) = true;
    }
    if (cities.size() < 2 || days.size() < 2) throw ValidationError("DiD requires at least 2 cities and 2 days");
    if (!any_treated || !any_untreated) throw ValidationError("no variation in treated");

    const int ref_city = spec.reference_city.value_or(*cities.begin());
    const int ref_day = spec.reference_day.value_or(*days.begin());
    if (!cities.count(ref_city)) throw ValidationError("reference city not in panel");
    if (!days.count(ref_day)) throw ValidationError("reference day not in panel");

    std::vector<std::string> names{"intercept"};
    std::map<int, Eigen::Index> city_col;
    std::map<int, Eigen::Index> day_col;
    if (spec.include_unit_fe) {
        for (int c : cities) {
            if (c == ref_city) continue;
            city_col[c] = static_cast<Eigen::Index>(names.size());
            names.push_back("city_" + std::to_string(c));
        }
    }
    if (spec.include_time_fe) {
        for (int d : days) {
            if (d == ref_day) continue;
            day_col[d] = static_cast<Eigen::Index>(names.size());
            names.push_back("day_" + std::to_string(d));
        }
    }
    const auto treated_col = static_cast<Eigen::Index>(names.size());
    names.push_back("treated");
    std::vector<std::pair<DidRegressor, Eigen::Index>> extra_cols;
    for (auto reg : spec.extra_regressors) {
        extra_cols.emplace_back(reg, static_cast<Eigen::Index>(names.size()));
        names.push_back(reg == DidRegressor::density ? "density" : "density_x_treated");
    }

    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(names.size()));
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& row = panel[rows[static_cast<std::size_t>(r)]];
        x(r, 0) = 1.0;
        if (auto it = city_col.find(row.city_id); it != city_col.end()) x(r, it->second) = 1.0;
        if (auto it = day_col.find(row.day); it != day_col.end()) x(r, it->second) = 1.0;
        const double treated = row.treated ? 1.0 : 0.0;
        x(r, treated_col) = treated;
        for (const auto& [reg, col] : extra_cols) {
            x(r, col) = reg == DidRegressor::density ? row.density : row.density * treated;
        }
        y[r] = outcome_value(row, spec.outcome);
    }
    DidResult res;
    res.spec = spec;
    res.regression = ols(x, y, std::move(names));
    res.rows = std::move(rows);
    res.outcome = std::move(y);
    return res;
}

std::vector<DailyPrediction> did_predict_daily(const DidResult& result, const PanelDataset& panel) {
    std::set<int> treated_cities;
    for (auto k : result.rows) {
        if (panel[k].treated) treated_cities.insert(panel[k].city_id);
    }
    std::map<int, DailyPrediction> by_day;
    for (std::size_t r = 0; r < result.rows.size(); ++r) {
        const auto& row = panel[result.rows[r]];
        if (!treated_cities.count(row.city_id)) continue;
        auto& p = by_day[row.day];
        p.day = row.day;
        p.mean_fitted += result.regression.fitted[static_cast<Eigen::Index>(r)];
        p.mean_actual += result.outcome[static_cast<Eigen::Index>(r)];
        ++p.cities;
    }
    std::vector<DailyPrediction> out;
    for (auto& [day, p] : by_day) {
        p.mean_fitted /= static_cast<double>(p.cities);
        p.mean_actual /= static_cast<double>(p.cities);
        out.push_back(p);
    }
    return out;
}

double within_estimate(const PanelDataset& panel, DidOutcome outcome) {
    std::map<int, std::pair<double, double>> city_sum;  // (y, d)
    std::map<int, std::pair<double, double>> day_sum;
    std::map<int, std::size_t> city_n;
    std::map<int, std::size_t> day_n;
    double y_all = 0.0;
    double d_all = 0.0;
    for (const auto& row : panel) {
        const double y = outcome_value(row, outcome);
        const double d = row.treated ? 1.0 : 0.0;
        city_sum[row.city_id].first += y;
        city_sum[row.city_id].second += d;
        day_sum[row.day].first += y;
        day_sum[row.day].second += d;
        ++city_n[row.city_id];
        ++day_n[row.day];
        y_all += y;
        d_all += d;
    }
    const auto total = static_cast<double>(panel.size());
    if (city_n.size() * day_n.size() != panel.size())
        throw ValidationError("within estimator requires a balanced panel");
    double num = 0.0;
    double den = 0.0;
    for (const auto& row : panel) {
        const double cn = static_cast<double>(city_n[row.city_id]);
        const double dn = static_cast<double>(day_n[row.day]);
        const double y = outcome_value(row, outcome) - city_sum[row.city_id].first / cn -
                         day_sum[row.day].first / dn + y_all / total;
        const double d = (row.treated ? 1.0 : 0.0) - city_sum[row.city_id].second / cn -
                         day_sum[row.day].second / dn + d_all / total;
        num += y * d;
        den += d * d;
    }
    if (den <= 0.0) throw ValidationError("no variation in treated");
    return num / den;
}

std::string to_string(DidOutcome o) {
    switch (o) {
        case DidOutcome::infected: return "infected";
        case DidOutcome::infected_frac: return "infected_frac";
        case DidOutcome::contacts: return "contacts";
        case DidOutcome::growth: return "growth";
    }
    return "infected";
}

DidOutcome parse_did_outcome(const std::string& s) {
    if (s == "infected") return DidOutcome::infected;
    if (s == "infected_frac") return DidOutcome::infected_frac;
    if (s == "contacts") return DidOutcome::contacts;
    if (s == "growth") return DidOutcome::growth;
    throw ValidationError("unknown DiD outcome: " + s);
}

DidSpec parse_did_spec(std::string_view text) {
    DidSpec spec;
    std::string item;
    std::istringstream is{std::string(text)};
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        if (a == std::string::npos) return std::string{};
        return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
    };
    auto flag = [](const std::string& v) {
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ValidationError("expected boolean, got '" + v + "'");
    };
    std::string line;
    while (std::getline(is, line)) {
        std::istringstream ls(line);
        while (std::getline(ls, item, ';')) {
            if (auto hash = item.find('#'); hash != std::string::npos) item = item.substr(0, hash);
            item = trim(item);
            if (item.empty()) continue;
            const auto eq = item.find('=');
            if (eq == std::string::npos) throw ValidationError("expected key=value in DiD spec: " + item);
            const std::string key = trim(item.substr(0, eq));
            const std::string value = trim(item.substr(eq + 1));
            if (key == "outcome") {
                spec.outcome = parse_did_outcome(value);
            } else if (key == "unit_fe") {
                spec.include_unit_fe = flag(value);
            } else if (key == "time_fe") {
                spec.include_time_fe = flag(value);
            } else if (key == "extra") {
                std::istringstream es(value);
                std::string reg;
                while (std::getline(es, reg, ',')) {
                    reg = trim(reg);
                    if (reg == "density") {
                        spec.extra_regressors.push_back(DidRegressor::density);
                    } else if (reg == "density_x_treated") {
                        spec.extra_regressors.push_back(DidRegressor::density_x_treated);
                    } else if (!reg.empty()) {
                        throw ValidationError("unknown DiD regressor: " + reg);
                    }
                }
            } else if (key == "reference_city") {
                spec.reference_city = std::stoi(value);
            } else if (key == "reference_day") {
                spec.reference_day = std::stoi(value);
            } else {
                throw ValidationError("unknown DiD spec key: " + key);
            }
        }
    }
    return spec;
}

// --- Treatment-coefficient table -------------------------------------------------

namespace {

bool same_density(double a, double b) { return std::abs(a - b) < 1e-9; }

bool in_partial_design(const CatalogEntry& e) {
    if (same_density(e.density, 1.0)) return !e.treatment_day;
    if (same_density(e.density, 0.5)) return e.treatment_day == 40;
    if (same_density(e.density, 1.5)) return e.treatment_day == 15;
    return false;
}

PanelDataset catalog_panel(std::span<const CatalogEntry> catalog, bool behavior, bool partial, int cutoff) {
    std::vector<CityRun> cities;
    int id = 0;
    for (const auto& e : catalog) {
        if (e.behavior != behavior) continue;
        if (partial && !in_partial_design(e)) continue;
        cities.push_back({id++, e.density, e.treatment_day, e.trace});
    }
    return build_panel(cities, cutoff);
}

}  // namespace

const TreatmentRow& TreatmentTable::find(bool behavior, DidOutcome outcome, bool interaction) const {
    for (const auto& r : rows) {
        if (r.behavior == behavior && r.outcome == outcome && r.interaction == interaction) return r;
    }
    throw std::out_of_range("treatment table cell not found");
}

TreatmentTable treatment_table(std::span<const CatalogEntry> catalog, int cutoff) {
    for (bool behavior : {false, true}) {
        for (double density : {0.5, 1.0, 1.5}) {
            for (std::optional<int> cohort : {std::optional<int>{}, std::optional<int>{15}, std::optional<int>{40}}) {
                const bool present = std::any_of(catalog.begin(), catalog.end(), [&](const CatalogEntry& e) {
                    return e.behavior == behavior && same_density(e.density, density) && e.treatment_day == cohort;
                });
                if (!present) {
                    throw ValidationError("missing catalog cell: behavior=" + std::to_string(behavior) +
                                          " density=" + format_double(density) + " treatment=" +
                                          (cohort ? std::to_string(*cohort) : std::string("never")));
                }
            }
        }
    }
    TreatmentTable table;
    for (bool behavior : {false, true}) {
        const auto full = catalog_panel(catalog, behavior, false, cutoff);
        const auto partial = catalog_panel(catalog, behavior, true, cutoff);
        for (DidOutcome outcome : {DidOutcome::infected, DidOutcome::contacts, DidOutcome::growth}) {
            for (bool interaction : {false, true}) {
                DidSpec spec;
                spec.outcome = outcome;
                // Density is constant within a city, so the city effects absorb
                // its main effect; only the interaction enters explicitly.
                if (interaction) spec.extra_regressors = {DidRegressor::density_x_treated};
                const auto t = did_estimate(full, spec);
                const auto e = did_estimate(partial, spec);
                TreatmentRow row;
                row.behavior = behavior;
                row.outcome = outcome;
                row.interaction = interaction;
                row.true_treated = t.delta();
                row.estimated_treated = e.delta();
                row.true_interaction = t.interaction();
                row.estimated_interaction = e.interaction();
                table.rows.push_back(row);
            }
        }
    }
    return table;
}

std::string format_treatment_table(const TreatmentTable& table) {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s %12s %12s %14s %14s\n", "Outcome", "True", "Estimated",
                  "True#Density", "Est#Density");
    for (bool behavior : {false, true}) {
        os << (behavior ? "With behavioral responses\n" : "Without behavioral responses\n") << buf;
        for (const auto& r : table.rows) {
            if (r.behavior != behavior) continue;
            const std::string label = r.interaction ? "" : to_string(r.outcome);
            char line[200];
            if (r.interaction) {
                std::snprintf(line, sizeof(line), "%-12s %12.3f %12.3f %14.3f %14.3f\n", label.c_str(),
                              r.true_treated, r.estimated_treated, r.true_interaction.value_or(0.0),
                              r.estimated_interaction.value_or(0.0));
            } else {
                std::snprintf(line, sizeof(line), "%-12s %12.3f %12.3f\n", label.c_str(), r.true_treated,
                              r.estimated_treated);
            }
            os << line;
        }
        os << "\n";
    }
    return os.str();
}

std::string treatment_table_csv(const TreatmentTable& table) {
    std::ostringstream os;
    os << "behavior,outcome,specification,true_treated,estimated_treated,true_interaction,estimated_interaction\n";
    for (const auto& r : table.rows) {
        os << (r.behavior ? 1 : 0) << "," << to_string(r.outcome) << ","
           << (r.interaction ? "density_x_treated" : "plain") << "," << format_double(r.true_treated) << ","
           << format_double(r.estimated_treated) << ","
           << (r.true_interaction ? format_double(*r.true_interaction) : "") << ","
           << (r.estimated_interaction ? format_double(*r.estimated_interaction) : "") << "\n";
    }
    return os.str();
}

}  // namespace spatial_sir
