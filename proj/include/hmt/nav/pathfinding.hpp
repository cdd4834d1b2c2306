#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hmt/common/geometry.hpp"

namespace hmt::nav {

class NavGrid {
public:
    NavGrid() = default;
    NavGrid(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }

    bool in_bounds(Voxel v) const { return v.x >= 0 && v.y >= 0 && v.x < width_ && v.y < height_; }
    bool blocked(Voxel v) const;
    bool walkable(Voxel v) const { return in_bounds(v) && !blocked(v); }
    void set_blocked(Voxel v, bool value = true);

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> blocked_;
};

// Start to goal inclusive; consecutive cells are 4-adjacent.
using Path = std::vector<Voxel>;

// Neighbor expansion order. Ties in the open list fall back to (x, y).
inline constexpr Voxel kNeighborOffsets[4] = {{0, -1}, {1, 0}, {0, 1}, {-1, 0}};

// A* with a Manhattan heuristic and unit edge costs. Returns nullopt when the
// goal cannot be reached. Throws Error(invalid_endpoint) if start is blocked or
// either endpoint is out of bounds.
std::optional<Path> plan_path(const NavGrid& grid, Voxel start, Voxel goal);

// Plans to the nearest walkable 4-neighbour of `target` (which is usually
// solid). Equal-length candidates are resolved in N, E, S, W order.
std::optional<Path> plan_path_adjacent(const NavGrid& grid, Voxel start, Voxel target);

bool is_valid_path(const NavGrid& grid, const Path& path, Voxel start, Voxel goal);

}  // namespace hmt::nav
