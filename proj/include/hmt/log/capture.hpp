#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace hmt::log {

// Live snapshot taken when an event was logged; the oracle for replay.
struct CapturedSnapshot {
    double timestamp = 0.0;
    std::string state;  // serialize_state() output

    bool operator==(const CapturedSnapshot&) const = default;
};

// capture.bin: back-to-back frames, each a 4-byte big-endian length followed
// by {"timestamp": t, "state": {...}}.
std::string encode_capture(const std::vector<CapturedSnapshot>& snapshots);
std::vector<CapturedSnapshot> decode_capture(std::string_view bytes);

void write_capture(const std::filesystem::path& path, const std::vector<CapturedSnapshot>& snapshots);
std::vector<CapturedSnapshot> read_capture(const std::filesystem::path& path);

}  // namespace hmt::log
