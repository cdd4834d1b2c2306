#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace hmt::jsonu {

using nlohmann::json;

// Strict accessors. All throw Error(schema_invalid) naming the offending key.
const json& field(const json& obj, std::string_view key);
const json* optional_field(const json& obj, std::string_view key);
std::int64_t get_int(const json& obj, std::string_view key);
double get_number(const json& obj, std::string_view key);
std::string get_string(const json& obj, std::string_view key);
bool get_bool(const json& obj, std::string_view key);
void expect_object(const json& j, std::string_view what);
void expect_array(const json& j, std::string_view what);
// Rejects keys outside `allowed`.
void expect_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view what);

}  // namespace hmt::jsonu
