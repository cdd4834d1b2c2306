#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hmt/replay/replay.hpp"

namespace hmt::replay {

// 8-bit RGB raster, row-major.
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    bool operator==(const Frame&) const = default;
    std::uint8_t* pixel(int x, int y) { return &rgb[(static_cast<size_t>(y) * width + x) * 3]; }
    const std::uint8_t* pixel(int x, int y) const { return &rgb[(static_cast<size_t>(y) * width + x) * 3]; }
};

struct Rgb {
    std::uint8_t r, g, b;
    bool operator==(const Rgb&) const = default;
};

inline constexpr Rgb kOutOfWorld{24, 24, 32};

// "topdown" renders the whole grid; an agent id renders that agent's
// egocentric crop, rotated so the agent faces up. Throws unknown_viewpoint.
Frame render_frame(const Snapshot& snapshot, std::string_view viewpoint);

Frame render_topdown(const Snapshot& snapshot);
Frame render_egocentric(const Snapshot& snapshot, const std::string& agent_id);

Rgb block_color(const world::Block& block);
Rgb agent_color(world::AgentKind kind);

std::string encode_png(const Frame& frame);

}  // namespace hmt::replay
