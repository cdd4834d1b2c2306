#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hmt/log/timeline.hpp"
#include "hmt/world/world.hpp"

namespace hmt::replay {

// Facing derived from the last movement; north is toward y = 0.
enum class Heading : std::uint8_t { north, east, south, west };

std::string_view to_string(Heading h);

struct DisplayPose {
    Position position;
    Heading heading = Heading::north;

    bool operator==(const DisplayPose&) const = default;
};

struct Snapshot {
    double t = 0.0;
    world::WorldState world;  // exact state after every event with timestamp <= t
    std::map<std::string, DisplayPose> display;  // interpolated between logged positions
};

// Latest time a timeline can be scrubbed to: footer end time, else last event.
double end_time(const log::MissionTimeline& timeline);

// Pure. Throws Error(t_out_of_range) outside [0, end_time].
Snapshot reconstruct(const log::MissionTimeline& timeline, double t);

// Incremental reconstruction. Seeking forward applies only the new events;
// seeking backward replays from the header.
class Replayer {
public:
    explicit Replayer(const log::MissionTimeline& timeline);

    const Snapshot& seek(double t);
    const Snapshot& current() const { return snap_; }

private:
    struct Keyframe {
        double t;
        Position position;
        Heading heading;  // facing on arrival
    };

    void reset();
    void refresh_display();

    const log::MissionTimeline& timeline_;
    std::map<std::string, std::vector<Keyframe>> keyframes_;
    Snapshot snap_;
    size_t applied_ = 0;
};

enum class MarkerKind : std::uint8_t { phase_change, decision_point, chat, block_placed, custom };

std::string_view to_string(MarkerKind k);
MarkerKind marker_kind_from_string(std::string_view s);  // throws schema_invalid
std::set<MarkerKind> all_marker_kinds();

struct Marker {
    double timestamp = 0.0;
    std::string label;
    MarkerKind kind = MarkerKind::custom;

    bool operator==(const Marker&) const = default;
};

// At most one marker per event: the highest-priority requested kind it
// matches, in the enum order above.
std::vector<Marker> extract_markers(const log::MissionTimeline& timeline, const std::set<MarkerKind>& kinds);

}  // namespace hmt::replay
