#include "hmt/replay/render.hpp"

#include <cmath>
#include <cstring>

#include <png.h>

#include "hmt/common/error.hpp"

namespace hmt::replay {

namespace {

Rgb material_color(const world::Material& m) {
    if (m == "wood") return {150, 100, 50};
    if (m == "stone") return {128, 128, 128};
    if (m == "brick") return {178, 60, 40};
    // Stable fallback for custom materials.
    std::uint32_t h = 2166136261u;
    for (unsigned char c : m) h = (h ^ c) * 16777619u;
    return {static_cast<std::uint8_t>(60 + h % 160), static_cast<std::uint8_t>(60 + (h >> 8) % 160),
            static_cast<std::uint8_t>(60 + (h >> 16) % 160)};
}

Rgb blend(Rgb a, Rgb b, int a_weight) {
    auto mix = [&](int x, int y) { return static_cast<std::uint8_t>((x * a_weight + y * (4 - a_weight)) / 4); };
    return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

void fill_rect(Frame& f, int x0, int y0, int w, int h, Rgb c) {
    for (int y = std::max(0, y0); y < std::min(f.height, y0 + h); ++y)
        for (int x = std::max(0, x0); x < std::min(f.width, x0 + w); ++x) {
            auto* p = f.pixel(x, y);
            p[0] = c.r, p[1] = c.g, p[2] = c.b;
        }
}

// Draws a cell's block with a one-pixel darker border for solid blocks.
void draw_cell(Frame& f, int px, int py, int size, const world::Block& b) {
    const Rgb c = block_color(b);
    fill_rect(f, px, py, size, size, c);
    if (world::is_solid(b) && size >= 4) {
        const Rgb edge = blend(c, {0, 0, 0}, 2);
        fill_rect(f, px, py, size, 1, edge);
        fill_rect(f, px, py + size - 1, size, 1, edge);
        fill_rect(f, px, py, 1, size, edge);
        fill_rect(f, px + size - 1, py, 1, size, edge);
    }
}

// Isoceles triangle centred at (cx, cy) pointing along (fx, fy).
void draw_glyph(Frame& f, double cx, double cy, double size, double fx, double fy, Rgb c) {
    const double r = size * 0.42;
    const double ax = cx + fx * r, ay = cy + fy * r;           // tip
    const double bx = cx - fx * r + fy * r * 0.8, by = cy - fy * r - fx * r * 0.8;
    const double qx = cx - fx * r - fy * r * 0.8, qy = cy - fy * r + fx * r * 0.8;
    auto edge = [](double x0, double y0, double x1, double y1, double x, double y) {
        return (x1 - x0) * (y - y0) - (y1 - y0) * (x - x0);
    };
    const int xmin = static_cast<int>(std::floor(cx - r - 1)), xmax = static_cast<int>(std::ceil(cx + r + 1));
    const int ymin = static_cast<int>(std::floor(cy - r - 1)), ymax = static_cast<int>(std::ceil(cy + r + 1));
    for (int y = std::max(0, ymin); y < std::min(f.height, ymax); ++y)
        for (int x = std::max(0, xmin); x < std::min(f.width, xmax); ++x) {
            const double sx = x + 0.5, sy = y + 0.5;
            const double e0 = edge(ax, ay, bx, by, sx, sy), e1 = edge(bx, by, qx, qy, sx, sy),
                         e2 = edge(qx, qy, ax, ay, sx, sy);
            if ((e0 >= 0 && e1 >= 0 && e2 >= 0) || (e0 <= 0 && e1 <= 0 && e2 <= 0)) {
                auto* p = f.pixel(x, y);
                p[0] = c.r, p[1] = c.g, p[2] = c.b;
            }
        }
}

std::pair<int, int> facing_vector(Heading h) {
    switch (h) {
        case Heading::north: return {0, -1};
        case Heading::east: return {1, 0};
        case Heading::south: return {0, 1};
        case Heading::west: return {-1, 0};
    }
    return {0, -1};
}

// World offset for a crop offset when the agent faces `h` and the crop shows
// the facing direction as up.
std::pair<int, int> to_world(Heading h, int lx, int ly) {
    switch (h) {
        case Heading::north: return {lx, ly};
        case Heading::east: return {-ly, lx};
        case Heading::south: return {-lx, -ly};
        case Heading::west: return {ly, -lx};
    }
    return {lx, ly};
}

// Inverse of to_world for continuous offsets.
std::pair<double, double> to_local(Heading h, double dx, double dy) {
    switch (h) {
        case Heading::north: return {dx, dy};
        case Heading::east: return {dy, -dx};
        case Heading::south: return {-dx, -dy};
        case Heading::west: return {-dy, dx};
    }
    return {dx, dy};
}

}  // namespace

Rgb block_color(const world::Block& b) {
    using world::BlockKind;
    switch (b.kind) {
        case BlockKind::air: return {200, 220, 255};
        case BlockKind::ground: return {96, 160, 72};
        case BlockKind::marker: return blend(material_color(b.material), {96, 160, 72}, 1);
        case BlockKind::tower_block: return b.count > 0 ? blend(material_color(b.material), {0, 0, 0}, 3) : Rgb{70, 110, 55};
        case BlockKind::crafting_table: return {110, 70, 30};
        case BlockKind::chest: return {220, 170, 40};
        case BlockKind::placed: return material_color(b.material);
    }
    return {0, 0, 0};
}

Rgb agent_color(world::AgentKind kind) {
    return kind == world::AgentKind::human ? Rgb{40, 90, 230} : Rgb{230, 40, 160};
}

Frame render_topdown(const Snapshot& s) {
    const auto& w = s.world;
    const int px = w.config->cell_px;
    Frame f{w.width() * px, w.height() * px, {}};
    f.rgb.assign(static_cast<size_t>(f.width) * f.height * 3, 0);
    for (int y = 0; y < w.height(); ++y)
        for (int x = 0; x < w.width(); ++x) draw_cell(f, x * px, y * px, px, w.at({x, y}));
    for (const auto& a : w.agents) {
        const auto it = s.display.find(a.id);
        const DisplayPose pose = it != s.display.end() ? it->second : DisplayPose{a.position, Heading::north};
        const auto [fx, fy] = facing_vector(pose.heading);
        draw_glyph(f, pose.position.x * px, pose.position.y * px, px, fx, fy, agent_color(a.kind));
    }
    return f;
}

Frame render_egocentric(const Snapshot& s, const std::string& agent_id) {
    const auto& w = s.world;
    const auto self_it = s.display.find(agent_id);
    if (!w.find_agent(agent_id) || self_it == s.display.end())
        throw Error(Errc::unknown_viewpoint, "no agent '" + agent_id + "' in this mission");
    const DisplayPose self = self_it->second;
    const int px = w.config->cell_px;
    const int r = w.config->view_radius;
    const int cells = 2 * r + 1;
    Frame f{cells * px, cells * px, {}};
    f.rgb.assign(static_cast<size_t>(f.width) * f.height * 3, 0);

    const Voxel centre = self.position.cell();
    for (int ly = -r; ly <= r; ++ly)
        for (int lx = -r; lx <= r; ++lx) {
            const auto [dx, dy] = to_world(self.heading, lx, ly);
            const Voxel v{centre.x + dx, centre.y + dy};
            const int ox = (lx + r) * px, oy = (ly + r) * px;
            if (!w.in_bounds(v)) fill_rect(f, ox, oy, px, px, kOutOfWorld);
            else draw_cell(f, ox, oy, px, w.at(v));
        }

    // Agents relative to the centre cell's middle, the viewer always facing up.
    const double cx = centre.x + 0.5, cy = centre.y + 0.5;
    for (const auto& a : w.agents) {
        const auto it = s.display.find(a.id);
        if (it == s.display.end()) continue;
        const auto [lx, ly] = to_local(self.heading, it->second.position.x - cx, it->second.position.y - cy);
        if (std::abs(lx) > r + 0.5 || std::abs(ly) > r + 0.5) continue;
        const auto [wfx, wfy] = facing_vector(it->second.heading);
        const auto [fx, fy] = to_local(self.heading, wfx, wfy);
        draw_glyph(f, (lx + r + 0.5) * px, (ly + r + 0.5) * px, px, fx, fy, agent_color(a.kind));
    }
    return f;
}

Frame render_frame(const Snapshot& s, std::string_view viewpoint) {
    if (viewpoint == "topdown") return render_topdown(s);
    return render_egocentric(s, std::string(viewpoint));
}

namespace {

void png_append(png_structp png, png_bytep data, png_size_t n) {
    auto* out = static_cast<std::string*>(png_get_io_ptr(png));
    out->append(reinterpret_cast<const char*>(data), n);
}

void png_flush_noop(png_structp) {}

}  // namespace

std::string encode_png(const Frame& frame) {
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw Error(Errc::io_failure, "png_create_write_struct failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw Error(Errc::io_failure, "png_create_info_struct failed");
    }
    std::string out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(Errc::io_failure, "PNG encoding failed");
    }
    png_set_write_fn(png, &out, png_append, png_flush_noop);
    png_set_IHDR(png, info, static_cast<png_uint_32>(frame.width), static_cast<png_uint_32>(frame.height), 8,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < frame.height; ++y)
        png_write_row(png, const_cast<png_bytep>(frame.pixel(0, y)));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

}  // namespace hmt::replay
