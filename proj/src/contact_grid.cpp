#include "spatial_sir/contact_grid.hpp"

#include <algorithm>
#include <cmath>

namespace spatial_sir {

void ContactGrid::build(std::span<const Point> positions, std::span<const std::uint8_t> member,
                        double side, double radius) {
    radius_ = radius;
    radius_sq_ = radius * radius;
    // Slightly wider than radius so float rounding of cell coordinates can never
    // separate two neighbors by more than one cell.
    cells_per_side_ = std::max(1, static_cast<int>(std::floor(side / (radius * (1.0 + 1e-9)))));
    // Cap memory for tiny radii; wider cells stay correct.
    cells_per_side_ = std::min(cells_per_side_, 4096);
    inv_cell_ = cells_per_side_ / side;

    const std::size_t n_cells = static_cast<std::size_t>(cells_per_side_) * cells_per_side_;
    cell_start_.assign(n_cells + 1, 0);
    std::vector<std::uint32_t> cell_of(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!member[i]) continue;
        const std::size_t c = static_cast<std::size_t>(cell_coord(positions[i].y)) * cells_per_side_ +
                              cell_coord(positions[i].x);
        cell_of[i] = static_cast<std::uint32_t>(c);
        ++cell_start_[c + 1];
    }
    for (std::size_t c = 0; c < n_cells; ++c) cell_start_[c + 1] += cell_start_[c];
    sorted_.resize(cell_start_[n_cells]);
    std::vector<std::uint32_t> fill(cell_start_.begin(), cell_start_.end() - 1);
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!member[i]) continue;
        sorted_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
    }
}

std::vector<std::vector<std::size_t>> brute_force_neighbors(std::span<const Point> positions,
                                                            std::span<const std::uint8_t> member,
                                                            double radius) {
    const double r2 = radius * radius;
    std::vector<std::vector<std::size_t>> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!member[i]) continue;
        for (std::size_t j = 0; j < positions.size(); ++j) {
            if (j == i || !member[j]) continue;
            const double dx = positions[j].x - positions[i].x;
            const double dy = positions[j].y - positions[i].y;
            if (dx * dx + dy * dy < r2) out[i].push_back(j);
        }
    }
    return out;
}

std::vector<std::vector<std::size_t>> grid_neighbors(std::span<const Point> positions,
                                                     std::span<const std::uint8_t> member,
                                                     double side, double radius) {
    ContactGrid grid;
    grid.build(positions, member, side, radius);
    std::vector<std::vector<std::size_t>> out(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (!member[i]) continue;
        grid.for_each_neighbor(positions, i, [&](std::size_t j) { out[i].push_back(j); });
        std::sort(out[i].begin(), out[i].end());
    }
    return out;
}

}  // namespace spatial_sir
