#pragma once

#include <cmath>
#include <compare>
#include <string>

namespace hmt {

// Integer grid cell. y grows "south", so N is y - 1.
struct Voxel {
    int x = 0;
    int y = 0;

    auto operator<=>(const Voxel&) const = default;
};

// Continuous world coordinates; cell (i, j) spans [i, i+1) x [j, j+1).
struct Position {
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Position&) const = default;

    Voxel cell() const {
        return {static_cast<int>(std::floor(x)), static_cast<int>(std::floor(y))};
    }
};

inline Position center_of(Voxel v) { return {v.x + 0.5, v.y + 0.5}; }

inline double distance(Position a, Position b) { return std::hypot(a.x - b.x, a.y - b.y); }

inline int manhattan(Voxel a, Voxel b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

inline std::string to_string(Voxel v) {
    return "(" + std::to_string(v.x) + "," + std::to_string(v.y) + ")";
}

}  // namespace hmt
