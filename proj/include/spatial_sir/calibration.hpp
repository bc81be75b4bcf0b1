#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "spatial_sir/scenario.hpp"

namespace spatial_sir {

/// rho = g0 / (r0 - 1). Throws when r0 <= 1 or g0 <= 0.
double rho_from_growth(double r0, double g0);

/// T_inf = (r0 - 1) / g0, the inverse of rho_from_growth.
double infectious_period(double r0, double g0);

/// Radius of the contact circle giving c_target expected contacts at this density.
/// Throws when the radius would reach city_side.
double radius_for_contacts(double c_target, double density, double city_side = 1.0);

struct CalibrationTarget {
    std::vector<double> target_growth;
    std::vector<double> weights;  // empty: equal weights
};

/// Throws ValidationError when shorter than 5 days or weights mismatch.
void validate_target(const CalibrationTarget& target);

struct SearchConfig {
    double pi_lo = 0.03;
    double pi_hi = 0.09;
    double mu_lo = 0.01;
    double mu_hi = 0.06;
    int grid = 5;
    int refine_iterations = 4;
    std::vector<std::uint64_t> seeds = default_seeds(10);
};

void validate_search(const SearchConfig& search);

struct Evaluation {
    double pi = 0.0;
    double mu = 0.0;
    double loss = 0.0;
    bool extinct = false;
    bool coarse = false;
};

struct CalibrationResult {
    double pi_hat = 0.0;
    double mu_hat = 0.0;
    double loss = 0.0;
    std::vector<Evaluation> evaluations;
};

/// Seed-mean daily growth of infections over the first `days` days.
std::vector<double> simulated_growth(const ScenarioSpec& spec, std::span<const std::uint64_t> seeds, int days);

/// Weighted MSE of simulated_growth against the target; nullopt when every
/// seed dies out before the window closes.
std::optional<double> growth_loss(const CalibrationTarget& target, const ScenarioSpec& spec,
                                  std::span<const std::uint64_t> seeds);

/// Grid search over (pi, mu) followed by coordinate refinement with halving steps.
CalibrationResult fit_pi_mu(const CalibrationTarget& target, const ScenarioSpec& spec, const SearchConfig& search);

/// CSV with columns day,growth (optional third column weight).
CalibrationTarget read_target_csv(const std::filesystem::path& path);
void write_target_csv(const std::filesystem::path& path, const CalibrationTarget& target);
std::string calibration_report_csv(const CalibrationResult& result);

}  // namespace spatial_sir
