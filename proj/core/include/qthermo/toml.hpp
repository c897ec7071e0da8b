// Minimal TOML-subset reader for scenario files. Supports comments, bare-key
// `key = value` pairs, [table] and [[array-of-table]] headers with dotted
// paths, and scalar/array values (strings, integers, floats, booleans,
// single-line arrays). That is the whole schema the scenario format needs;
// anything outside the subset fails loudly with a line number.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qthermo/errors.hpp"

namespace qthermo::toml {

struct Value {
    enum class Kind { String, Integer, Float, Boolean, Array, Table };

    Kind kind = Kind::Table;
    std::string string_value;
    int64_t integer_value = 0;
    double float_value = 0.0;
    bool boolean_value = false;
    std::vector<Value> array;
    std::map<std::string, Value> table;

    bool is_table() const { return kind == Kind::Table; }
    bool contains(const std::string& key) const;
    const Value* find(const std::string& key) const;

    // Coercing accessors; Integer coerces to double for as_double.
    double as_double() const;
    int64_t as_integer() const;
    bool as_boolean() const;
    const std::string& as_string() const;
};

// Parses the document into a root table. Throws SchemaError with a line
// reference on malformed input.
Value parse(const std::string& text);

}  // namespace qthermo::toml
