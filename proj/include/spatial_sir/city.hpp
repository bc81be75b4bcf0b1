#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spatial_sir/contact_grid.hpp"
#include "spatial_sir/model.hpp"
#include "spatial_sir/rng.hpp"

namespace spatial_sir {

enum class Health : std::uint8_t { susceptible, infected, recovered };

struct AgentRecord {
    Point position;
    Health health = Health::susceptible;
    double risk_aversion = 0.0;
    bool isolated = false;
    bool locked = false;
    std::optional<int> infected_on;
    std::optional<Count> infector;
};

struct HealthCounts {
    Count s = 0;
    Count i = 0;
    Count r = 0;
};

/// Independent generators for each stochastic subsystem of one replication.
struct RngStreams {
    RngStreams(std::uint64_t seed, std::uint64_t salt)
        : placement(seed, Subsystem::placement, salt),
          outbreak(seed, Subsystem::outbreak, salt),
          movement(seed, Subsystem::movement, salt),
          transmission(seed, Subsystem::transmission, salt),
          recovery(seed, Subsystem::recovery, salt),
          risk(seed, Subsystem::risk, salt),
          lockdown(seed, Subsystem::lockdown, salt) {}

    Rng placement;
    Rng outbreak;
    Rng movement;
    Rng transmission;
    Rng recovery;
    Rng risk;
    Rng lockdown;
};

/// Spatial configuration of the city, stored column-wise so the contact grid
/// can read positions as one contiguous span.
class CityState {
public:
    CityState(double side, std::vector<Point> positions, std::vector<Health> health,
              std::vector<double> risk_aversion);

    std::size_t size() const { return positions.size(); }
    AgentRecord agent(std::size_t i) const;
    HealthCounts counts() const;

    /// 1 for agents taking part in movement and contacts (neither isolated nor locked).
    std::vector<std::uint8_t> participation() const;

    // Agents sorted by decreasing risk aversion (ties by index).
    const std::vector<std::uint32_t>& risk_order() const { return risk_order_; }

    double side;
    int day = 0;
    std::vector<Point> positions;
    std::vector<Health> health;
    std::vector<double> risk_aversion;
    std::vector<std::uint8_t> isolated;
    std::vector<std::uint8_t> locked;
    std::vector<int> infected_on;         // -1 when never infected
    std::vector<std::int64_t> infector;   // -1 when none
    bool lockdown_applied = false;

private:
    std::vector<std::uint32_t> risk_order_;
};

std::vector<Point> place_agents(const Geography& geo, Count n, Rng& rng);

/// Initial health: the outbreak agents are Infected, all others Susceptible.
std::vector<Health> seed_outbreak(std::span<const Point> positions, Count i0, const Geography& geo,
                                  Rng& rng);

/// Anchors of the symmetric outbreak layout, in absolute coordinates.
std::vector<Point> symmetric_anchors(int k, double side);

void step_movement(CityState& state, double mu, const Geography& geo, Rng& rng);

/// Symmetric adjacency among participating agents (strict distance < radius).
std::vector<std::vector<std::size_t>> contact_sets(const CityState& state, double radius);

struct TransmissionResult {
    std::vector<std::size_t> newly_infected;
};

/// Synchronous transmission from start-of-day health. `grid` must be built on
/// the participating agents of `state`.
TransmissionResult step_transmission(CityState& state, double pi, const ContactGrid& grid, Rng& rng);

/// Convenience overload that builds the grid itself.
TransmissionResult step_transmission(CityState& state, double pi, double radius, Rng& rng);

/// Agents infected before today recover with probability rho. Returns the count.
Count step_recovery(CityState& state, double rho, Rng& rng);

std::string to_string(Health h);

}  // namespace spatial_sir
