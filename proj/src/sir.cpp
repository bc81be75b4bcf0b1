#include "spatial_sir/sir.hpp"

#include <cmath>

namespace spatial_sir {

SirParams SirParams::linear(double beta, double rho, double n) {
    SirParams p;
    p.beta = beta;
    p.rho = rho;
    p.n = n;
    p.hazard_form = HazardForm::linear;
    return p;
}

SirParams SirParams::discrete_contact(double pi, double contacts, double rho, double n) {
    SirParams p;
    p.beta = pi * contacts;
    p.rho = rho;
    p.n = n;
    p.hazard_form = HazardForm::discrete_contact;
    p.pi = pi;
    p.contacts = contacts;
    return p;
}

double infection_probability(double pi, double c, double i_frac, HazardForm form) {
    if (form == HazardForm::linear) return pi * c * i_frac;
    const double per_contact = pi * i_frac;
    if (per_contact > 1.0) throw ValidationError("impossible hazard: pi * i_frac > 1");
    if (i_frac <= 0.0) return 0.0;
    return 1.0 - std::pow(1.0 - per_contact, c);
}

double alpha_response(double i_frac, const BehavioralParams& params) {
    if (i_frac <= params.i_bar) return 1.0;
    return std::pow(params.i_bar / i_frac, 1.0 - params.phi);
}

std::vector<SirState> simulate_sir(const SirParams& params, double i0, int horizon,
                                   const std::optional<BehavioralParams>& behavior,
                                   const std::optional<SirLockdown>& lockdown) {
    if (i0 < 0.0 || i0 > params.n) throw ValidationError("i0 must lie in [0, N]");
    if (params.beta < 0.0) throw ValidationError("beta must be >= 0");
    if (!(params.rho > 0.0 && params.rho <= 1.0)) throw ValidationError("rho must lie in (0, 1]");

    std::vector<SirState> out;
    out.reserve(static_cast<std::size_t>(horizon) + 1);
    SirState st{0, params.n - i0, i0, 0.0};
    out.push_back(st);
    for (int t = 1; t <= horizon; ++t) {
        const double i_frac = st.i / params.n;
        double scale = 1.0;
        if (behavior) scale *= alpha_response(i_frac, *behavior);
        if (lockdown && t >= lockdown->start_day) scale *= 1.0 - lockdown->share;

        double hazard;
        if (params.hazard_form == HazardForm::linear) {
            hazard = params.beta * scale * i_frac;
        } else {
            hazard = infection_probability(params.pi, params.contacts * scale, i_frac);
        }
        if (hazard > 1.0) hazard = 1.0;
        const double infections = st.s * hazard;
        const double recoveries = params.rho * st.i;
        SirState next;
        next.day = t;
        next.s = st.s - infections;
        next.i = st.i + infections - recoveries;
        // r absorbs the rounding so that s + i + r == N exactly.
        next.r = params.n - next.s - next.i;
        st = next;
        out.push_back(st);
    }
    return out;
}

double final_size(double r0) {
    if (r0 <= 1.0) return 0.0;
    // g(x) = 1 - exp(-r0 x) - x is positive below the nonzero root and negative above it.
    auto g = [r0](double x) { return -std::expm1(-r0 * x) - x; };
    double lo = 1e-12;
    double hi = 1.0;
    if (g(lo) <= 0.0) return 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double peak_fraction(double r0) {
    if (r0 < 1.0) throw ValidationError("peak_fraction requires r0 >= 1");
    return 1.0 - (1.0 + std::log(r0)) / r0;
}

SirPeak summarize_sir(const std::vector<SirState>& traj) {
    SirPeak p;
    if (traj.empty()) return p;
    const double n = traj.front().s + traj.front().i + traj.front().r;
    for (const auto& st : traj) {
        const double f = st.i / n;
        if (f > p.peak_i_frac) {
            p.peak_i_frac = f;
            p.peak_day = st.day;
        }
    }
    p.final_size = (traj.back().r + traj.back().i) / n;
    return p;
}

}  // namespace spatial_sir
