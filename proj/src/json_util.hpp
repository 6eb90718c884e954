#pragma once

// Shape-checked accessors over parsed JSON; every failure is a ParseError
// naming the document path.

#include "sonarpath/error.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace sonarpath::json_util {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::pair<int, int> line_column(std::string_view text, std::size_t byte)
{
    int line = 1;
    int column = 1;
    const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

inline json parse_text(std::string_view text)
{
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_column(text, e.byte);
        std::string msg = e.what();
        // drop the library's "[json.exception.parse_error.101] " prefix
        if (auto p = msg.find("] "); p != std::string::npos)
            msg = msg.substr(p + 2);
        throw ParseError("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg, line,
                         column);
    }
}

[[noreturn]] inline void fail(const std::string& path, const std::string& what)
{
    throw ParseError(path + ": " + what);
}

inline const json& require(const json& obj, const char* key, const std::string& path)
{
    if (!obj.is_object())
        fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end())
        fail(path, std::string("missing field '") + key + "'");
    return *it;
}

inline const json* optional_field(const json& obj, const char* key)
{
    auto it = obj.find(key);
    return it == obj.end() || it->is_null() ? nullptr : &*it;
}

inline std::string as_string(const json& v, const std::string& path)
{
    if (!v.is_string())
        fail(path, "expected a string");
    return v.get<std::string>();
}

inline bool as_bool(const json& v, const std::string& path)
{
    if (!v.is_boolean())
        fail(path, "expected true or false");
    return v.get<bool>();
}

inline double as_number(const json& v, const std::string& path)
{
    if (!v.is_number())
        fail(path, "expected a number");
    return v.get<double>();
}

inline std::uint64_t as_count(const json& v, const std::string& path)
{
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
        fail(path, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

inline std::int64_t as_integer(const json& v, const std::string& path)
{
    if (!v.is_number_integer())
        fail(path, "expected an integer");
    return v.get<std::int64_t>();
}

inline const json& as_array(const json& v, const std::string& path)
{
    if (!v.is_array())
        fail(path, "expected an array");
    return v;
}

inline std::string string_field(const json& obj, const char* key, const std::string& path)
{
    return as_string(require(obj, key, path), path + "." + key);
}

inline std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& path)
{
    const json* v = optional_field(obj, key);
    if (!v)
        return std::nullopt;
    return as_string(*v, path + "." + key);
}

inline std::string item(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

} // namespace sonarpath::json_util
