#include "spatial_sir/model.hpp"

#include <cmath>

namespace spatial_sir {

namespace {

void check_probability(double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError(std::string("probability out of range: ") + name + " = " +
                              std::to_string(p));
    }
}

}  // namespace

double expected_contacts(double density, double radius) {
    return density * std::numbers::pi * radius * radius;
}

DerivedQuantities derive_quantities(const EpidemicParams& params, const Geography& geo) {
    DerivedQuantities d;
    d.density = static_cast<double>(params.n_agents) / (geo.city_side * geo.city_side);
    d.contagion_area = std::numbers::pi * params.contagion_radius * params.contagion_radius;
    d.contacts = expected_contacts(d.density, params.contagion_radius);
    d.beta = params.contagion_prob * d.contacts;
    d.r0 = params.recovery_prob > 0.0 ? d.beta / params.recovery_prob : 0.0;
    return d;
}

CheckedParams validate_params(const EpidemicParams& params, const Geography& geo) {
    check_probability(params.recovery_prob, "recovery_prob");
    check_probability(params.contagion_prob, "contagion_prob");
    if (params.n_agents < 1) throw ValidationError("n_agents must be >= 1");
    if (params.initial_infected < 0) throw ValidationError("initial_infected must be >= 0");
    if (params.initial_infected > params.n_agents)
        throw ValidationError("initial_infected exceeds n_agents");
    if (!(params.contagion_radius > 0.0)) throw ValidationError("contagion_radius must be > 0");
    if (!(params.move_distance >= 0.0)) throw ValidationError("move_distance must be >= 0");
    if (params.horizon < 1) throw ValidationError("horizon must be >= 1");
    if (!(geo.city_side > 0.0)) throw ValidationError("city_side must be > 0");
    if (params.contagion_radius >= geo.city_side)
        throw ValidationError("contagion_radius must be smaller than city_side");
    if (geo.cluster_anchor.x < 0.0 || geo.cluster_anchor.x > 1.0 || geo.cluster_anchor.y < 0.0 ||
        geo.cluster_anchor.y > 1.0)
        throw ValidationError("cluster_anchor must lie inside the city");
    if (geo.outbreak_mode == OutbreakMode::symmetric_clusters && geo.cluster_count < 1)
        throw ValidationError("cluster_count must be >= 1");
    return {params, geo, derive_quantities(params, geo)};
}

std::vector<SeriesSample> growth_rates(std::span<const double> infected) {
    std::vector<SeriesSample> out;
    for (std::size_t t = 0; t + 1 < infected.size(); ++t) {
        if (infected[t] > 0.0) {
            out.push_back({static_cast<int>(t), (infected[t + 1] - infected[t]) / infected[t]});
        }
    }
    return out;
}

std::string to_string(DensityMode m) {
    return m == DensityMode::uniform ? "uniform" : "heterogeneous";
}

std::string to_string(OutbreakMode m) {
    switch (m) {
        case OutbreakMode::cluster: return "cluster";
        case OutbreakMode::random: return "random";
        case OutbreakMode::symmetric_clusters: return "symmetric_clusters";
    }
    return "cluster";
}

std::string to_string(RelocationMode m) {
    switch (m) {
        case RelocationMode::walk: return "walk";
        case RelocationMode::daily_uniform_redraw: return "daily_uniform_redraw";
        case RelocationMode::frozen: return "frozen";
    }
    return "walk";
}

DensityMode parse_density_mode(const std::string& s) {
    if (s == "uniform") return DensityMode::uniform;
    if (s == "heterogeneous") return DensityMode::heterogeneous;
    throw ValidationError("unknown density_mode: " + s);
}

OutbreakMode parse_outbreak_mode(const std::string& s) {
    if (s == "cluster") return OutbreakMode::cluster;
    if (s == "random") return OutbreakMode::random;
    if (s == "symmetric_clusters") return OutbreakMode::symmetric_clusters;
    throw ValidationError("unknown outbreak_mode: " + s);
}

RelocationMode parse_relocation_mode(const std::string& s) {
    if (s == "walk") return RelocationMode::walk;
    if (s == "daily_uniform_redraw") return RelocationMode::daily_uniform_redraw;
    if (s == "frozen") return RelocationMode::frozen;
    throw ValidationError("unknown relocation_mode: " + s);
}

}  // namespace spatial_sir
