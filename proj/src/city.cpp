#include "spatial_sir/city.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace spatial_sir {

CityState::CityState(double side_, std::vector<Point> positions_, std::vector<Health> health_,
                     std::vector<double> risk_aversion_)
    : side(side_),
      positions(std::move(positions_)),
      health(std::move(health_)),
      risk_aversion(std::move(risk_aversion_)) {
    const std::size_t n = positions.size();
    if (health.size() != n || risk_aversion.size() != n)
        throw ValidationError("CityState columns must have equal length");
    isolated.assign(n, 0);
    locked.assign(n, 0);
    infected_on.assign(n, -1);
    infector.assign(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (health[i] != Health::susceptible) infected_on[i] = 0;
    }
    risk_order_.resize(n);
    std::iota(risk_order_.begin(), risk_order_.end(), 0u);
    std::stable_sort(risk_order_.begin(), risk_order_.end(), [&](std::uint32_t a, std::uint32_t b) {
        return risk_aversion[a] > risk_aversion[b];
    });
}

AgentRecord CityState::agent(std::size_t i) const {
    AgentRecord a;
    a.position = positions[i];
    a.health = health[i];
    a.risk_aversion = risk_aversion[i];
    a.isolated = isolated[i] != 0;
    a.locked = locked[i] != 0;
    if (infected_on[i] >= 0) a.infected_on = infected_on[i];
    if (infector[i] >= 0) a.infector = infector[i];
    return a;
}

HealthCounts CityState::counts() const {
    HealthCounts c;
    for (Health h : health) {
        switch (h) {
            case Health::susceptible: ++c.s; break;
            case Health::infected: ++c.i; break;
            case Health::recovered: ++c.r; break;
        }
    }
    return c;
}

std::vector<std::uint8_t> CityState::participation() const {
    std::vector<std::uint8_t> m(size());
    for (std::size_t i = 0; i < size(); ++i) m[i] = (isolated[i] || locked[i]) ? 0 : 1;
    return m;
}

namespace {

Point clamp_to_city(Point p, double side) {
    return {std::clamp(p.x, 0.0, side), std::clamp(p.y, 0.0, side)};
}

Point draw_location(const Geography& geo, Rng& rng) {
    const double side = geo.city_side;
    if (geo.density_mode == DensityMode::uniform) {
        return {rng.uniform() * side, rng.uniform() * side};
    }
    const double sigma = side / 4.0;
    const double max_r = side / 2.0;
    double r;
    do {
        r = std::abs(rng.normal() * sigma);
    } while (r > max_r);
    const double theta = rng.uniform() * 2.0 * std::numbers::pi;
    return clamp_to_city({side / 2.0 + r * std::cos(theta), side / 2.0 + r * std::sin(theta)}, side);
}

// Picks `count` not-yet-chosen agents nearest to `anchor` (ties by index).
void take_nearest(std::span<const Point> positions, Point anchor, Count count,
                  std::vector<Health>& health) {
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (health[i] != Health::susceptible) continue;
        const double dx = positions[i].x - anchor.x;
        const double dy = positions[i].y - anchor.y;
        order.emplace_back(dx * dx + dy * dy, i);
    }
    const auto k = static_cast<std::size_t>(std::min<Count>(count, static_cast<Count>(order.size())));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
    for (std::size_t j = 0; j < k; ++j) health[order[j].second] = Health::infected;
}

}  // namespace

std::vector<Point> place_agents(const Geography& geo, Count n, Rng& rng) {
    if (n < 1) throw ValidationError("place_agents requires n >= 1");
    std::vector<Point> out(static_cast<std::size_t>(n));
    for (auto& p : out) p = draw_location(geo, rng);
    return out;
}

std::vector<Point> symmetric_anchors(int k, double side) {
    std::vector<Point> out;
    const int m = static_cast<int>(std::lround(std::sqrt(static_cast<double>(k))));
    if (m * m == k) {
        // Tile the city m x m; each tile gets a mirrored copy of the (0.25, 0.25) anchor.
        const double tile = side / m;
        for (int b = 0; b < m; ++b) {
            for (int a = 0; a < m; ++a) {
                const double u = (a % 2 == 0) ? 0.25 : 0.75;
                const double v = (b % 2 == 0) ? 0.25 : 0.75;
                out.push_back({(a + u) * tile, (b + v) * tile});
            }
        }
        return out;
    }
    for (int j = 0; j < k; ++j) {
        const double theta = std::numbers::pi / 4.0 + 2.0 * std::numbers::pi * j / k;
        out.push_back({side / 2.0 + side / 4.0 * std::cos(theta), side / 2.0 + side / 4.0 * std::sin(theta)});
    }
    return out;
}

std::vector<Health> seed_outbreak(std::span<const Point> positions, Count i0, const Geography& geo,
                                  Rng& rng) {
    const auto n = static_cast<Count>(positions.size());
    if (i0 < 0 || i0 > n) throw ValidationError("initial_infected exceeds n_agents");
    std::vector<Health> health(positions.size(), Health::susceptible);
    if (i0 == 0) return health;
    switch (geo.outbreak_mode) {
        case OutbreakMode::cluster: {
            const Point anchor{geo.cluster_anchor.x * geo.city_side, geo.cluster_anchor.y * geo.city_side};
            take_nearest(positions, anchor, i0, health);
            break;
        }
        case OutbreakMode::random: {
            std::vector<std::size_t> idx(positions.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            for (Count j = 0; j < i0; ++j) {
                const auto pick = static_cast<std::size_t>(j) + rng.below(static_cast<std::uint64_t>(n - j));
                std::swap(idx[static_cast<std::size_t>(j)], idx[pick]);
                health[idx[static_cast<std::size_t>(j)]] = Health::infected;
            }
            break;
        }
        case OutbreakMode::symmetric_clusters: {
            const auto anchors = symmetric_anchors(geo.cluster_count, geo.city_side);
            const auto k = static_cast<Count>(anchors.size());
            for (Count a = 0; a < k; ++a) {
                const Count group = i0 / k + (a < i0 % k ? 1 : 0);
                take_nearest(positions, anchors[static_cast<std::size_t>(a)], group, health);
            }
            break;
        }
    }
    return health;
}

void step_movement(CityState& state, double mu, const Geography& geo, Rng& rng) {
    switch (geo.relocation_mode) {
        case RelocationMode::frozen:
            return;
        case RelocationMode::daily_uniform_redraw:
            for (std::size_t i = 0; i < state.size(); ++i) {
                if (state.isolated[i] || state.locked[i]) continue;
                state.positions[i] = draw_location(geo, rng);
            }
            return;
        case RelocationMode::walk:
            break;
    }
    if (mu <= 0.0) return;
    const double side = state.side;
    constexpr double kPi = std::numbers::pi;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.isolated[i] || state.locked[i]) continue;
        const Point p = state.positions[i];
        double theta = rng.uniform() * 2.0 * kPi;
        Point q{p.x + mu * std::cos(theta), p.y + mu * std::sin(theta)};
        // Required sign of the x / y direction component after hitting a wall.
        int sx = 0;
        int sy = 0;
        for (int attempt = 0; attempt < 4; ++attempt) {
            const bool out_x = q.x < 0.0 || q.x > side;
            const bool out_y = q.y < 0.0 || q.y > side;
            if (!out_x && !out_y) break;
            if (q.x < 0.0) sx = 1;
            if (q.x > side) sx = -1;
            if (q.y < 0.0) sy = 1;
            if (q.y > side) sy = -1;
            // Inward half-plane, or quarter-plane in a corner.
            const double center = std::atan2(static_cast<double>(sy), static_cast<double>(sx));
            const double width = (sx != 0 && sy != 0) ? kPi / 2.0 : kPi;
            theta = center + (rng.uniform() - 0.5) * width;
            q = {p.x + mu * std::cos(theta), p.y + mu * std::sin(theta)};
        }
        state.positions[i] = clamp_to_city(q, side);
    }
}

std::vector<std::vector<std::size_t>> contact_sets(const CityState& state, double radius) {
    if (!(radius < state.side)) throw ValidationError("contact radius must be smaller than city side");
    const auto member = state.participation();
    return grid_neighbors(state.positions, member, state.side, radius);
}

TransmissionResult step_transmission(CityState& state, double pi, const ContactGrid& grid, Rng& rng) {
    TransmissionResult result;
    const std::size_t n = state.size();
    std::vector<std::uint32_t> hits(n, 0);
    std::vector<std::int64_t> chosen(n, -1);
    std::vector<std::size_t> touched;
    for (std::size_t i = 0; i < n; ++i) {
        if (state.health[i] != Health::infected || state.isolated[i] || state.locked[i]) continue;
        grid.for_each_neighbor(state.positions, i, [&](std::size_t j) {
            if (state.health[j] != Health::susceptible) return;
            if (!rng.bernoulli(pi)) return;
            const std::uint32_t h = ++hits[j];
            if (h == 1) {
                touched.push_back(j);
                chosen[j] = static_cast<std::int64_t>(i);
            } else if (rng.below(h) == 0) {
                // Reservoir sampling: uniform choice among successful transmitters.
                chosen[j] = static_cast<std::int64_t>(i);
            }
        });
    }
    std::sort(touched.begin(), touched.end());
    for (std::size_t j : touched) {
        state.health[j] = Health::infected;
        state.infected_on[j] = state.day;
        state.infector[j] = chosen[j];
    }
    result.newly_infected = std::move(touched);
    return result;
}

TransmissionResult step_transmission(CityState& state, double pi, double radius, Rng& rng) {
    ContactGrid grid;
    const auto member = state.participation();
    grid.build(state.positions, member, state.side, radius);
    return step_transmission(state, pi, grid, rng);
}

Count step_recovery(CityState& state, double rho, Rng& rng) {
    Count recovered = 0;
    for (std::size_t i = 0; i < state.size(); ++i) {
        if (state.health[i] != Health::infected || state.infected_on[i] >= state.day) continue;
        if (rng.bernoulli(rho)) {
            state.health[i] = Health::recovered;
            ++recovered;
        }
    }
    return recovered;
}

std::string to_string(Health h) {
    switch (h) {
        case Health::susceptible: return "S";
        case Health::infected: return "I";
        case Health::recovered: return "R";
    }
    return "S";
}

}  // namespace spatial_sir
