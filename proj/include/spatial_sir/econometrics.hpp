#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spatial_sir/engine.hpp"

namespace spatial_sir {

struct PanelRow {
    int city_id = 0;
    int day = 0;
    double density = 1.0;  // relative to the baseline city
    Count n = 0;
    bool treated = false;
    Count i_count = 0;
    Count s_count = 0;
    Count r_count = 0;
    double i_frac = 0.0;
    double s_frac = 0.0;
    std::optional<double> growth;
    // Contacts per agent relative to the no-policy, no-behavior level:
    // the share of agents that are neither isolated nor locked.
    double contacts = 1.0;
};

using PanelDataset = std::vector<PanelRow>;

/// One simulated city entering a panel.
struct CityRun {
    int city_id = 0;
    double density = 1.0;
    std::optional<int> treatment_day;
    RunTrace trace;
};

/// One row per (city, day) for days [0, cutoff). Traces that ended early are
/// continued in their steady state. Throws on duplicate (city, day).
PanelDataset build_panel(std::span<const CityRun> cities, int cutoff = 80);

struct RegressionResult {
    std::vector<std::string> names;
    Eigen::VectorXd coefficients;
    Eigen::VectorXd std_errors;
    Eigen::VectorXd fitted;
    Eigen::VectorXd residuals;
    double r_squared = 0.0;

    /// Coefficient by name; throws std::out_of_range when absent.
    double coef(const std::string& name) const;
};

/// Least squares through column-pivoted Householder QR. Throws
/// ValidationError naming the collinear columns when the design is rank deficient.
RegressionResult ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names);

struct BetaEstimate {
    double beta_hat = 0.0;
    double intercept = 0.0;
    std::size_t rows = 0;
};

/// Per density level: growth = intercept + beta_hat * s_frac.
std::map<double, BetaEstimate> estimate_beta_by_density(const PanelDataset& panel);

enum class DidOutcome { infected, infected_frac, contacts, growth };

enum class DidRegressor { density, density_x_treated };

struct DidSpec {
    DidOutcome outcome = DidOutcome::infected;
    bool include_unit_fe = true;
    bool include_time_fe = true;
    std::vector<DidRegressor> extra_regressors;
    // Reference categories; default to the lowest city id and the first day.
    std::optional<int> reference_city;
    std::optional<int> reference_day;
};

struct DidResult {
    DidSpec spec;
    RegressionResult regression;
    std::vector<std::size_t> rows;  // panel rows used, aligned with fitted values
    Eigen::VectorXd outcome;

    double delta() const { return regression.coef("treated"); }
    std::optional<double> interaction() const;
};

/// Y = nu + eta_city + gamma_day + delta * treated + ctrl_coef * X, with dummies.
DidResult did_estimate(const PanelDataset& panel, const DidSpec& spec);

struct DailyPrediction {
    int day = 0;
    double mean_fitted = 0.0;
    double mean_actual = 0.0;
    std::size_t cities = 0;
};

/// Per-day mean of fitted and actual outcomes over ever-treated cities.
std::vector<DailyPrediction> did_predict_daily(const DidResult& result, const PanelDataset& panel);

/// Within (two-way demeaned) estimate of delta on a balanced panel.
double within_estimate(const PanelDataset& panel, DidOutcome outcome);

double outcome_value(const PanelRow& row, DidOutcome outcome);
std::string to_string(DidOutcome o);
DidOutcome parse_did_outcome(const std::string& s);
DidSpec parse_did_spec(std::string_view text);

// --- Treatment-coefficient table -------------------------------------------------

struct CatalogEntry {
    bool behavior = false;
    double density = 1.0;
    std::optional<int> treatment_day;
    std::uint64_t seed = 1;
    RunTrace trace;
};

struct TreatmentRow {
    bool behavior = false;
    DidOutcome outcome = DidOutcome::infected;
    bool interaction = false;
    double true_treated = 0.0;
    double estimated_treated = 0.0;
    std::optional<double> true_interaction;
    std::optional<double> estimated_interaction;
};

struct TreatmentTable {
    std::vector<TreatmentRow> rows;
    const TreatmentRow& find(bool behavior, DidOutcome outcome, bool interaction) const;
};

/// Full design: every density in {0.5, 1, 1.5} with never / day-15 / day-40
/// cohorts. Partial design: density 1 never treated, 0.5 treated at 40,
/// 1.5 treated at 15.
TreatmentTable treatment_table(std::span<const CatalogEntry> catalog, int cutoff = 80);

std::string format_treatment_table(const TreatmentTable& table);
std::string treatment_table_csv(const TreatmentTable& table);

}  // namespace spatial_sir
