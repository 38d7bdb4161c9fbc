#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

// Minimal TOML reader covering the subset the experiment configs use:
// comments, [table] headers, dotted keys, strings with basic escapes,
// integers, floats, booleans and single-line arrays of scalars. Keys are
// flattened to dotted paths; every value remembers its source line so
// diagnostics can point at the offending spot.
namespace toml {

struct Value {
    enum class Kind { Str, Int, Float, Bool, Array };
    Kind kind = Kind::Str;
    std::string str;
    std::int64_t integer = 0;
    double number = 0.0; // set for both Int and Float
    bool boolean = false;
    std::vector<Value> array;
    int line = 0;
};

struct ParseError : std::runtime_error {
    ParseError(int line, const std::string& msg)
        : std::runtime_error(msg), line(line) {}
    int line;
};

using Table = std::map<std::string, Value>;

Table parse(const std::string& text);
Table parse_file(const std::string& path);

} // namespace toml
