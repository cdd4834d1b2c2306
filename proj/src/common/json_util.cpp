#include "hmt/common/json_util.hpp"

#include <algorithm>

#include "hmt/common/error.hpp"

namespace hmt::jsonu {

void expect_object(const json& j, std::string_view what) {
    if (!j.is_object()) throw Error(Errc::schema_invalid, std::string(what) + " must be an object");
}

void expect_array(const json& j, std::string_view what) {
    if (!j.is_array()) throw Error(Errc::schema_invalid, std::string(what) + " must be an array");
}

const json& field(const json& obj, std::string_view key) {
    if (!obj.is_object()) throw Error(Errc::schema_invalid, "expected object holding '" + std::string(key) + "'");
    auto it = obj.find(key);
    if (it == obj.end()) throw Error(Errc::schema_invalid, "missing key '" + std::string(key) + "'");
    return *it;
}

const json* optional_field(const json& obj, std::string_view key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::int64_t get_int(const json& obj, std::string_view key) {
    const json& v = field(obj, key);
    if (!v.is_number_integer()) throw Error(Errc::schema_invalid, "'" + std::string(key) + "' must be an integer");
    return v.get<std::int64_t>();
}

double get_number(const json& obj, std::string_view key) {
    const json& v = field(obj, key);
    if (!v.is_number()) throw Error(Errc::schema_invalid, "'" + std::string(key) + "' must be a number");
    return v.get<double>();
}

std::string get_string(const json& obj, std::string_view key) {
    const json& v = field(obj, key);
    if (!v.is_string()) throw Error(Errc::schema_invalid, "'" + std::string(key) + "' must be a string");
    return v.get<std::string>();
}

bool get_bool(const json& obj, std::string_view key) {
    const json& v = field(obj, key);
    if (!v.is_boolean()) throw Error(Errc::schema_invalid, "'" + std::string(key) + "' must be a boolean");
    return v.get<bool>();
}

void expect_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view what) {
    expect_object(obj, what);
    for (const auto& [key, value] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw Error(Errc::schema_invalid, "unexpected key '" + key + "' in " + std::string(what));
    }
}

}  // namespace hmt::jsonu
