#include "hmt/nav/pathfinding.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

#include "hmt/common/error.hpp"

namespace hmt::nav {

NavGrid::NavGrid(int width, int height)
    : width_(width), height_(height), blocked_(static_cast<size_t>(width) * height, 0) {}

bool NavGrid::blocked(Voxel v) const {
    if (!in_bounds(v)) return true;
    return blocked_[static_cast<size_t>(v.y) * width_ + v.x] != 0;
}

void NavGrid::set_blocked(Voxel v, bool value) {
    if (!in_bounds(v)) return;
    blocked_[static_cast<size_t>(v.y) * width_ + v.x] = value ? 1 : 0;
}

namespace {

struct OpenEntry {
    int f;
    int h;
    int x;
    int y;

    // std::priority_queue is a max-heap; invert to pop the smallest key.
    bool operator<(const OpenEntry& o) const {
        return std::tie(f, h, x, y) > std::tie(o.f, o.h, o.x, o.y);
    }
};

}  // namespace

std::optional<Path> plan_path(const NavGrid& grid, Voxel start, Voxel goal) {
    if (!grid.in_bounds(start) || !grid.in_bounds(goal))
        throw Error(Errc::invalid_endpoint, "endpoint out of bounds");
    if (grid.blocked(start)) throw Error(Errc::invalid_endpoint, "start is blocked");
    if (start == goal) return Path{start};
    if (grid.blocked(goal)) return std::nullopt;

    const int w = grid.width();
    const auto index = [w](Voxel v) { return static_cast<size_t>(v.y) * w + v.x; };
    const size_t n = static_cast<size_t>(w) * grid.height();
    constexpr int kInf = std::numeric_limits<int>::max();
    std::vector<int> g(n, kInf);
    std::vector<int> parent(n, -1);
    std::vector<std::uint8_t> closed(n, 0);

    std::priority_queue<OpenEntry> open;
    g[index(start)] = 0;
    const int h0 = manhattan(start, goal);
    open.push({h0, h0, start.x, start.y});

    while (!open.empty()) {
        const OpenEntry top = open.top();
        open.pop();
        const Voxel cur{top.x, top.y};
        const size_t ci = index(cur);
        if (closed[ci]) continue;
        closed[ci] = 1;
        if (cur == goal) break;
        for (const Voxel& d : kNeighborOffsets) {
            const Voxel nb{cur.x + d.x, cur.y + d.y};
            if (!grid.walkable(nb)) continue;
            const size_t ni = index(nb);
            if (closed[ni]) continue;
            const int cand = g[ci] + 1;
            if (cand < g[ni]) {
                g[ni] = cand;
                parent[ni] = static_cast<int>(ci);
                const int h = manhattan(nb, goal);
                open.push({cand + h, h, nb.x, nb.y});
            }
        }
    }

    if (!closed[index(goal)]) return std::nullopt;
    Path path;
    for (int at = static_cast<int>(index(goal)); at != -1; at = parent[static_cast<size_t>(at)]) {
        path.push_back({at % w, at / w});
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::optional<Path> plan_path_adjacent(const NavGrid& grid, Voxel start, Voxel target) {
    if (!grid.in_bounds(target)) throw Error(Errc::invalid_endpoint, "target out of bounds");
    std::optional<Path> best;
    for (const Voxel& d : kNeighborOffsets) {
        const Voxel goal{target.x + d.x, target.y + d.y};
        if (!grid.walkable(goal)) continue;
        auto path = plan_path(grid, start, goal);
        if (path && (!best || path->size() < best->size())) best = std::move(path);
    }
    return best;
}

bool is_valid_path(const NavGrid& grid, const Path& path, Voxel start, Voxel goal) {
    if (path.empty() || path.front() != start || path.back() != goal) return false;
    for (size_t i = 0; i < path.size(); ++i) {
        if (!grid.walkable(path[i])) return false;
        if (i > 0 && manhattan(path[i - 1], path[i]) != 1) return false;
    }
    return true;
}

}  // namespace hmt::nav
