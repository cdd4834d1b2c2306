#include "hmt/log/capture.hpp"

#include <nlohmann/json.hpp>

#include "hmt/common/error.hpp"
#include "hmt/common/text.hpp"

namespace hmt::log {

using nlohmann::json;

std::string encode_capture(const std::vector<CapturedSnapshot>& snapshots) {
    std::string out;
    for (const auto& s : snapshots) {
        // The state is already canonical JSON text; splice it in unparsed.
        const std::string body = "{\"timestamp\":" + json(s.timestamp).dump() + ",\"state\":" + s.state + "}";
        const auto n = static_cast<std::uint32_t>(body.size());
        out.push_back(static_cast<char>(n >> 24));
        out.push_back(static_cast<char>(n >> 16));
        out.push_back(static_cast<char>(n >> 8));
        out.push_back(static_cast<char>(n));
        out += body;
    }
    return out;
}

std::vector<CapturedSnapshot> decode_capture(std::string_view bytes) {
    std::vector<CapturedSnapshot> out;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        if (bytes.size() - pos < 4) throw Error(Errc::schema_invalid, "capture truncated inside a length header");
        const auto* b = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
        const std::uint32_t n = (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) | (std::uint32_t(b[2]) << 8) | b[3];
        pos += 4;
        if (bytes.size() - pos < n) throw Error(Errc::schema_invalid, "capture truncated inside a frame");
        json j = json::parse(bytes.substr(pos, n), nullptr, false);
        pos += n;
        if (j.is_discarded() || !j.is_object() || !j.contains("timestamp") || !j.contains("state"))
            throw Error(Errc::schema_invalid, "capture frame " + std::to_string(out.size()) + " is malformed");
        out.push_back({j["timestamp"].get<double>(), j["state"].dump()});
    }
    return out;
}

void write_capture(const std::filesystem::path& path, const std::vector<CapturedSnapshot>& snapshots) {
    write_file(path, encode_capture(snapshots));
}

std::vector<CapturedSnapshot> read_capture(const std::filesystem::path& path) { return decode_capture(read_file(path)); }

}  // namespace hmt::log
