#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spatial_sir {

using Count = std::int64_t;

/// Raised when a parameter bundle or input violates a documented contract.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct EpidemicParams {
    Count n_agents = 26600;
    Count initial_infected = 30;
    double recovery_prob = 0.154;
    double contagion_prob = 0.054;
    double contagion_radius = 0.013;
    double move_distance = 0.034;
    int horizon = 600;

    bool operator==(const EpidemicParams&) const = default;
};

enum class DensityMode { uniform, heterogeneous };
enum class OutbreakMode { cluster, random, symmetric_clusters };
enum class RelocationMode { walk, daily_uniform_redraw, frozen };

struct Point {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const Point&) const = default;
};

struct Geography {
    double city_side = 1.0;
    DensityMode density_mode = DensityMode::uniform;
    OutbreakMode outbreak_mode = OutbreakMode::cluster;
    // Anchor of the clustered outbreak in units of city_side, so presets that
    // rescale the city keep the outbreak at the same relative location.
    Point cluster_anchor{0.25, 0.25};
    int cluster_count = 4;
    RelocationMode relocation_mode = RelocationMode::walk;

    bool operator==(const Geography&) const = default;
};

struct DerivedQuantities {
    double density = 0.0;
    double contagion_area = 0.0;
    double contacts = 0.0;
    double beta = 0.0;
    double r0 = 0.0;

    bool operator==(const DerivedQuantities&) const = default;
};

struct SeriesSample {
    int day = 0;
    double value = 0.0;
    bool operator==(const SeriesSample&) const = default;
};

struct CheckedParams {
    EpidemicParams params;
    Geography geo;
    DerivedQuantities derived;
};

/// Expected number of agents inside a contagion circle: d * pi * radius^2.
double expected_contacts(double density, double radius);

DerivedQuantities derive_quantities(const EpidemicParams& params, const Geography& geo);

/// Throws ValidationError on out-of-range probabilities, I0 > N, or a contagion
/// radius that covers the whole city.
CheckedParams validate_params(const EpidemicParams& params, const Geography& geo);

/// (I_{t+1} - I_t) / I_t for every t with I_t > 0; zero days emit nothing.
std::vector<SeriesSample> growth_rates(std::span<const double> infected);

std::string to_string(DensityMode m);
std::string to_string(OutbreakMode m);
std::string to_string(RelocationMode m);
DensityMode parse_density_mode(const std::string& s);
OutbreakMode parse_outbreak_mode(const std::string& s);
RelocationMode parse_relocation_mode(const std::string& s);

}  // namespace spatial_sir
