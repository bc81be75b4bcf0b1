#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spatial_sir/model.hpp"

namespace spatial_sir {

/// Uniform bucket grid over [0, side]^2 for fixed-radius neighbor queries.
///
/// Cells are at least `radius` wide, so every neighbor of a point lies in the
/// 3x3 block of cells around it. Points are stored in a counting-sorted index
/// array; only points flagged as members are inserted.
class ContactGrid {
public:
    ContactGrid() = default;

    void build(std::span<const Point> positions, std::span<const std::uint8_t> member, double side,
               double radius);

    double radius() const { return radius_; }

    /// Calls fn(j) for each member j != i with dist(i, j) < radius.
    template <typename Fn>
    void for_each_neighbor(std::span<const Point> positions, std::size_t i, Fn&& fn) const {
        const Point p = positions[i];
        const int cx = cell_coord(p.x);
        const int cy = cell_coord(p.y);
        const int x0 = cx > 0 ? cx - 1 : 0;
        const int x1 = cx + 1 < cells_per_side_ ? cx + 1 : cells_per_side_ - 1;
        const int y0 = cy > 0 ? cy - 1 : 0;
        const int y1 = cy + 1 < cells_per_side_ ? cy + 1 : cells_per_side_ - 1;
        for (int gy = y0; gy <= y1; ++gy) {
            for (int gx = x0; gx <= x1; ++gx) {
                const std::size_t c = static_cast<std::size_t>(gy) * cells_per_side_ + gx;
                for (std::uint32_t k = cell_start_[c]; k < cell_start_[c + 1]; ++k) {
                    const std::uint32_t j = sorted_[k];
                    if (j == i) continue;
                    const double dx = positions[j].x - p.x;
                    const double dy = positions[j].y - p.y;
                    if (dx * dx + dy * dy < radius_sq_) fn(static_cast<std::size_t>(j));
                }
            }
        }
    }

    /// Visits every unordered member pair within radius once.
    template <typename Fn>
    void for_each_pair(std::span<const Point> positions, Fn&& fn) const {
        for (int gy = 0; gy < cells_per_side_; ++gy) {
            for (int gx = 0; gx < cells_per_side_; ++gx) {
                const std::size_t c = static_cast<std::size_t>(gy) * cells_per_side_ + gx;
                // Same cell, then the four "forward" neighbors.
                for (std::uint32_t a = cell_start_[c]; a < cell_start_[c + 1]; ++a) {
                    const std::uint32_t i = sorted_[a];
                    const Point p = positions[i];
                    for (std::uint32_t b = a + 1; b < cell_start_[c + 1]; ++b) {
                        visit_pair(positions, p, i, sorted_[b], fn);
                    }
                }
                static constexpr int kForward[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
                for (const auto& off : kForward) {
                    const int nx = gx + off[0];
                    const int ny = gy + off[1];
                    if (nx < 0 || nx >= cells_per_side_ || ny >= cells_per_side_) continue;
                    const std::size_t d = static_cast<std::size_t>(ny) * cells_per_side_ + nx;
                    for (std::uint32_t a = cell_start_[c]; a < cell_start_[c + 1]; ++a) {
                        const std::uint32_t i = sorted_[a];
                        const Point p = positions[i];
                        for (std::uint32_t b = cell_start_[d]; b < cell_start_[d + 1]; ++b) {
                            visit_pair(positions, p, i, sorted_[b], fn);
                        }
                    }
                }
            }
        }
    }

private:
    int cell_coord(double v) const {
        int c = static_cast<int>(v * inv_cell_);
        if (c < 0) c = 0;
        if (c >= cells_per_side_) c = cells_per_side_ - 1;
        return c;
    }

    template <typename Fn>
    void visit_pair(std::span<const Point> positions, Point p, std::uint32_t i, std::uint32_t j,
                    Fn& fn) const {
        const double dx = positions[j].x - p.x;
        const double dy = positions[j].y - p.y;
        if (dx * dx + dy * dy < radius_sq_) fn(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }

    double radius_ = 0.0;
    double radius_sq_ = 0.0;
    double inv_cell_ = 1.0;
    int cells_per_side_ = 1;
    std::vector<std::uint32_t> cell_start_;
    std::vector<std::uint32_t> sorted_;
};

/// O(n^2) reference: sorted neighbor lists of members within radius.
std::vector<std::vector<std::size_t>> brute_force_neighbors(std::span<const Point> positions,
                                                            std::span<const std::uint8_t> member,
                                                            double radius);

/// Sorted neighbor lists computed through the grid.
std::vector<std::vector<std::size_t>> grid_neighbors(std::span<const Point> positions,
                                                     std::span<const std::uint8_t> member,
                                                     double side, double radius);

}  // namespace spatial_sir
