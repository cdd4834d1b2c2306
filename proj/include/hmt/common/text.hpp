#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace hmt {

// Shortest decimal form that round-trips, "312" for 312.0.
std::string format_seconds(double value);

std::string sha256_hex(std::string_view bytes);

// Throws Error(missing_file / io_failure).
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace hmt
