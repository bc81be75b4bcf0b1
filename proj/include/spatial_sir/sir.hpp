#pragma once

#include <optional>
#include <vector>

#include "spatial_sir/model.hpp"

namespace spatial_sir {

/// Deterministic mean-field SIR state; compartments are real-valued.
struct SirState {
    int day = 0;
    double s = 0.0;
    double i = 0.0;
    double r = 0.0;
};

enum class HazardForm { linear, discrete_contact };

struct SirParams {
    double beta = 0.0;
    double rho = 0.154;
    double n = 26600.0;
    HazardForm hazard_form = HazardForm::linear;
    // Used by the discrete-contact hazard; beta == pi * contacts by construction.
    double pi = 0.0;
    double contacts = 0.0;

    static SirParams linear(double beta, double rho, double n);
    static SirParams discrete_contact(double pi, double contacts, double rho, double n);
};

struct BehavioralParams {
    double phi = 0.88;
    double i_bar = 0.01;
    bool operator==(const BehavioralParams&) const = default;
};

/// Contact-reduction schedule for the mean-field model: from start_day on,
/// the hazard is scaled by (1 - share).
struct SirLockdown {
    double share = 0.25;
    int start_day = 20;
};

/// Daily infection probability of a susceptible after `c` contacts.
double infection_probability(double pi, double c, double i_frac,
                             HazardForm form = HazardForm::discrete_contact);

/// Contact scaling factor in (0, 1]: 1 below the threshold, (i_bar/i)^(1-phi) above.
double alpha_response(double i_frac, const BehavioralParams& params);

/// Runs `horizon` days, returning horizon+1 states starting at day 0.
std::vector<SirState> simulate_sir(const SirParams& params, double i0, int horizon,
                                   const std::optional<BehavioralParams>& behavior = std::nullopt,
                                   const std::optional<SirLockdown>& lockdown = std::nullopt);

/// Root of R/N = -(1/r0) ln(1 - R/N) in (0,1); 0 when r0 <= 1.
double final_size(double r0);

/// 1 - (1 + ln r0) / r0; throws for r0 < 1.
double peak_fraction(double r0);

struct SirPeak {
    double peak_i_frac = 0.0;
    int peak_day = 0;
    double final_size = 0.0;
};

SirPeak summarize_sir(const std::vector<SirState>& traj);

}  // namespace spatial_sir
