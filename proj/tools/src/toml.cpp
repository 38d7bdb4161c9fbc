#include "toml.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace toml {

namespace {

bool is_bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

struct Cursor {
    const std::string& s;
    std::size_t i = 0;
    int line;

    bool done() const { return i >= s.size(); }
    char peek() const { return s[i]; }
    void skip_ws() {
        while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
};

std::string parse_key(Cursor& c) {
    c.skip_ws();
    std::string key;
    while (!c.done() && (is_bare_char(c.peek()) || c.peek() == '.')) {
        key += c.peek();
        ++c.i;
    }
    if (key.empty() || key.front() == '.' || key.back() == '.')
        throw ParseError(c.line, "expected a key");
    return key;
}

std::string parse_string(Cursor& c) {
    ++c.i; // opening quote
    std::string out;
    while (true) {
        if (c.done()) throw ParseError(c.line, "unterminated string");
        const char ch = c.peek();
        ++c.i;
        if (ch == '"') return out;
        if (ch == '\\') {
            if (c.done()) throw ParseError(c.line, "dangling escape");
            const char esc = c.peek();
            ++c.i;
            switch (esc) {
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            default:
                throw ParseError(c.line, std::string("unsupported escape \\") + esc);
            }
        } else {
            out += ch;
        }
    }
}

Value parse_scalar(Cursor& c);

Value parse_array(Cursor& c) {
    Value v;
    v.kind = Value::Kind::Array;
    v.line = c.line;
    ++c.i; // '['
    c.skip_ws();
    if (!c.done() && c.peek() == ']') {
        ++c.i;
        return v;
    }
    while (true) {
        c.skip_ws();
        v.array.push_back(parse_scalar(c));
        c.skip_ws();
        if (c.done()) throw ParseError(c.line, "unterminated array");
        if (c.peek() == ',') {
            ++c.i;
            continue;
        }
        if (c.peek() == ']') {
            ++c.i;
            return v;
        }
        throw ParseError(c.line, "expected ',' or ']' in array");
    }
}

Value parse_scalar(Cursor& c) {
    c.skip_ws();
    if (c.done()) throw ParseError(c.line, "expected a value");
    Value v;
    v.line = c.line;
    const char first = c.peek();
    if (first == '"') {
        v.kind = Value::Kind::Str;
        v.str = parse_string(c);
        return v;
    }
    if (first == '[') return parse_array(c);

    std::string tok;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
           c.peek() != ' ' && c.peek() != '\t') {
        tok += c.peek();
        ++c.i;
    }
    if (tok == "true" || tok == "false") {
        v.kind = Value::Kind::Bool;
        v.boolean = (tok == "true");
        return v;
    }
    // Underscore separators are allowed in numbers.
    std::string num;
    for (char ch : tok)
        if (ch != '_') num += ch;
    if (num.empty()) throw ParseError(c.line, "expected a value");

    const bool looks_float = num.find_first_of(".eE") != std::string::npos ||
                             num.find("inf") != std::string::npos ||
                             num.find("nan") != std::string::npos;
    char* end = nullptr;
    if (!looks_float) {
        const long long parsed = std::strtoll(num.c_str(), &end, 10);
        if (end && *end == '\0') {
            v.kind = Value::Kind::Int;
            v.integer = parsed;
            v.number = static_cast<double>(parsed);
            return v;
        }
    }
    const double parsed = std::strtod(num.c_str(), &end);
    if (!end || *end != '\0')
        throw ParseError(c.line, "cannot parse value '" + tok + "'");
    v.kind = Value::Kind::Float;
    v.number = parsed;
    return v;
}

} // namespace

Table parse(const std::string& text) {
    Table table;
    std::string prefix;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        Cursor c{raw, 0, line_no};
        c.skip_ws();
        if (c.done() || c.peek() == '#') continue;

        if (c.peek() == '[') {
            ++c.i;
            const std::string name = parse_key(c);
            c.skip_ws();
            if (c.done() || c.peek() != ']')
                throw ParseError(line_no, "expected ']' after table name");
            ++c.i;
            c.skip_ws();
            if (!c.done() && c.peek() != '#')
                throw ParseError(line_no, "unexpected text after table header");
            prefix = name + ".";
            continue;
        }

        const std::string key = parse_key(c);
        c.skip_ws();
        if (c.done() || c.peek() != '=')
            throw ParseError(line_no, "expected '=' after key '" + key + "'");
        ++c.i;
        Value v = parse_scalar(c);
        v.line = line_no;
        c.skip_ws();
        if (!c.done() && c.peek() != '#')
            throw ParseError(line_no, "unexpected text after value");

        const std::string path = prefix + key;
        if (table.count(path))
            throw ParseError(line_no, "duplicate key '" + path + "'");
        table.emplace(path, std::move(v));
    }
    return table;
}

Table parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(0, "cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

} // namespace toml
