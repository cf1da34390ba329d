// SPDX-License-Identifier: Apache-2.0
//
// Path-tracking accessors for validating JSON documents. Every failure is
// reported as a parse error prefixed with the JSON pointer of the offending
// value.

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "json.hpp"
#include "skelgen/error.hpp"

namespace skelgen::json_fields {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& pointer, const std::string& what) {
    throw parse_error("schema violation at " + (pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

inline std::string child(const std::string& pointer, const std::string& key) {
    // RFC 6901 escaping
    std::string token;
    for (char c : key) {
        if (c == '~') token += "~0";
        else if (c == '/') token += "~1";
        else token += c;
    }
    return pointer + "/" + token;
}

inline std::string child(const std::string& pointer, std::size_t index) { return pointer + "/" + std::to_string(index); }

inline const json& member(const json& obj, const std::string& pointer, const std::string& key) {
    if (!obj.is_object()) fail(pointer, "expected object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(child(pointer, key), "missing field");
    return *it;
}

inline const json& array_at(const json& v, const std::string& pointer) {
    if (!v.is_array()) fail(pointer, "expected array");
    return v;
}

inline std::string as_string(const json& v, const std::string& pointer) {
    if (!v.is_string()) fail(pointer, "expected string");
    return v.get<std::string>();
}

inline double as_number(const json& v, const std::string& pointer) {
    if (!v.is_number()) fail(pointer, "expected number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(pointer, "expected finite number");
    return d;
}

inline int as_int(const json& v, const std::string& pointer) {
    if (!v.is_number_integer()) fail(pointer, "expected integer");
    const auto i = v.get<long long>();
    if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) fail(pointer, "integer out of range");
    return static_cast<int>(i);
}

/// Integral values are written as integers so goldens stay readable.
inline json number(double d) {
    if (std::floor(d) == d && std::fabs(d) < 9.0e15) {
        return json(static_cast<long long>(d));
    }
    return json(d);
}

}  // namespace skelgen::json_fields
