#include "qthermo/toml.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace qthermo::toml {

namespace {

[[noreturn]] void fail(size_t line, const std::string& message) {
    throw SchemaError("toml: line " + std::to_string(line) + ": " + message);
}

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Strip a trailing comment, respecting quoted strings.
std::string strip_comment(const std::string& s) {
    bool in_string = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_string = !in_string;
        if (s[i] == '#' && !in_string) return s.substr(0, i);
    }
    return s;
}

bool valid_bare_key(const std::string& key) {
    if (key.empty()) return false;
    return std::all_of(key.begin(), key.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-';
    });
}

std::vector<std::string> split_path(const std::string& path, size_t line) {
    std::vector<std::string> parts;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
        part = trim(part);
        if (!valid_bare_key(part)) fail(line, "invalid table path '" + path + "'");
        parts.push_back(part);
    }
    if (parts.empty()) fail(line, "empty table path");
    return parts;
}

std::string parse_string(const std::string& text, size_t line, size_t& pos) {
    std::string out;
    ++pos;  // opening quote
    while (pos < text.size() && text[pos] != '"') {
        char c = text[pos];
        if (c == '\\') {
            ++pos;
            if (pos >= text.size()) fail(line, "dangling escape in string");
            switch (text[pos]) {
                case 'n': c = '\n'; break;
                case 't': c = '\t'; break;
                case '"': c = '"'; break;
                case '\\': c = '\\'; break;
                default: fail(line, "unsupported escape in string");
            }
        }
        out.push_back(c);
        ++pos;
    }
    if (pos >= text.size()) fail(line, "unterminated string");
    ++pos;  // closing quote
    return out;
}

Value parse_value(const std::string& text, size_t line, size_t& pos);

Value parse_array(const std::string& text, size_t line, size_t& pos) {
    Value value;
    value.kind = Value::Kind::Array;
    ++pos;  // opening bracket
    while (true) {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos >= text.size()) fail(line, "unterminated array");
        if (text[pos] == ']') {
            ++pos;
            return value;
        }
        value.array.push_back(parse_value(text, line, pos));
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos < text.size() && text[pos] == ',') {
            ++pos;
        } else if (pos < text.size() && text[pos] == ']') {
            ++pos;
            return value;
        } else {
            fail(line, "expected ',' or ']' in array");
        }
    }
}

Value parse_scalar(const std::string& token, size_t line) {
    Value value;
    if (token == "true" || token == "false") {
        value.kind = Value::Kind::Boolean;
        value.boolean_value = (token == "true");
        return value;
    }
    if (token == "inf" || token == "+inf") {
        value.kind = Value::Kind::Float;
        value.float_value = std::numeric_limits<double>::infinity();
        return value;
    }
    if (token == "-inf") {
        value.kind = Value::Kind::Float;
        value.float_value = -std::numeric_limits<double>::infinity();
        return value;
    }
    // Integer unless it carries a float marker.
    const bool floaty = token.find_first_of(".eE") != std::string::npos;
    if (!floaty) {
        int64_t parsed = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), parsed);
        if (ec == std::errc() && ptr == token.data() + token.size()) {
            value.kind = Value::Kind::Integer;
            value.integer_value = parsed;
            return value;
        }
    }
    try {
        size_t consumed = 0;
        const double parsed = std::stod(token, &consumed);
        if (consumed == token.size()) {
            value.kind = Value::Kind::Float;
            value.float_value = parsed;
            return value;
        }
    } catch (const std::exception&) {
        // fall through to the failure below
    }
    fail(line, "cannot parse value '" + token + "'");
}

Value parse_value(const std::string& text, size_t line, size_t& pos) {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos >= text.size()) fail(line, "missing value");
    if (text[pos] == '"') {
        Value value;
        value.kind = Value::Kind::String;
        value.string_value = parse_string(text, line, pos);
        return value;
    }
    if (text[pos] == '[') return parse_array(text, line, pos);
    size_t end = pos;
    while (end < text.size() && text[end] != ',' && text[end] != ']' &&
           !std::isspace(static_cast<unsigned char>(text[end]))) {
        ++end;
    }
    const std::string token = text.substr(pos, end - pos);
    pos = end;
    return parse_scalar(token, line);
}

Value* descend(Value* root, const std::vector<std::string>& path, size_t line) {
    Value* node = root;
    for (const auto& part : path) {
        if (!node->is_table()) fail(line, "path component '" + part + "' is not a table");
        Value& child = node->table[part];
        if (child.kind == Value::Kind::Array) {
            if (child.array.empty()) fail(line, "empty table array at '" + part + "'");
            node = &child.array.back();
        } else {
            if (child.table.empty() && child.kind != Value::Kind::Table) {
                fail(line, "key '" + part + "' already holds a scalar");
            }
            child.kind = Value::Kind::Table;
            node = &child;
        }
    }
    return node;
}

}  // namespace

bool Value::contains(const std::string& key) const { return table.count(key) > 0; }

const Value* Value::find(const std::string& key) const {
    const auto it = table.find(key);
    return (it == table.end()) ? nullptr : &it->second;
}

double Value::as_double() const {
    if (kind == Kind::Float) return float_value;
    if (kind == Kind::Integer) return static_cast<double>(integer_value);
    throw SchemaError("toml: value is not a number");
}

int64_t Value::as_integer() const {
    if (kind == Kind::Integer) return integer_value;
    throw SchemaError("toml: value is not an integer");
}

bool Value::as_boolean() const {
    if (kind == Kind::Boolean) return boolean_value;
    throw SchemaError("toml: value is not a boolean");
}

const std::string& Value::as_string() const {
    if (kind == Kind::String) return string_value;
    throw SchemaError("toml: value is not a string");
}

Value parse(const std::string& text) {
    Value root;
    root.kind = Value::Kind::Table;
    Value* current = &root;

    std::stringstream stream(text);
    std::string raw;
    size_t line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        const std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;

        if (line.front() == '[') {
            const bool array_header = line.size() >= 2 && line[1] == '[';
            const std::string closer = array_header ? "]]" : "]";
            const size_t close = line.find(closer);
            if (close == std::string::npos || trim(line.substr(close + closer.size())) != "") {
                fail(line_no, "malformed table header");
            }
            const size_t open = array_header ? 2 : 1;
            const auto path = split_path(line.substr(open, close - open), line_no);

            if (array_header) {
                Value* parent = &root;
                for (size_t i = 0; i + 1 < path.size(); ++i) {
                    parent = descend(parent, {path[i]}, line_no);
                }
                Value& slot = parent->table[path.back()];
                if (slot.kind != Value::Kind::Array && !slot.table.empty()) {
                    fail(line_no, "key '" + path.back() + "' is not a table array");
                }
                slot.kind = Value::Kind::Array;
                Value element;
                element.kind = Value::Kind::Table;
                slot.array.push_back(std::move(element));
                current = &slot.array.back();
            } else {
                current = descend(&root, path, line_no);
            }
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos) fail(line_no, "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (!valid_bare_key(key)) fail(line_no, "invalid key '" + key + "'");
        size_t pos = 0;
        const std::string rhs = trim(line.substr(eq + 1));
        if (rhs.empty()) fail(line_no, "missing value for key '" + key + "'");
        Value value = parse_value(rhs, line_no, pos);
        if (trim(rhs.substr(pos)) != "") fail(line_no, "trailing characters after value");
        if (current->contains(key)) fail(line_no, "duplicate key '" + key + "'");
        current->table[key] = std::move(value);
    }
    return root;
}

}  // namespace qthermo::toml
