#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace msgc {

struct ParseValue;

struct UIntV {
    uint64_t value = 0;
    int width_bits = 0;
};

struct ArrayV {
    std::vector<ParseValue> elems;
};

struct VectorV {
    std::vector<ParseValue> elems;
};

/// Fields in construction order, which equals declaration order.
struct RecordV {
    std::vector<std::pair<std::string, ParseValue>> fields;

    ParseValue* find(const std::string& name);
    const ParseValue* find(const std::string& name) const;
};

/// inner is empty (arm not yet produced) or holds exactly one value.
struct VariantV {
    std::string arm_name;
    int arm_index = -1;
    std::vector<ParseValue> inner;
};

struct ParseValue {
    std::variant<std::monostate, UIntV, ArrayV, VectorV, RecordV, VariantV> node;
    std::string type_name;  // set when the value was produced by a named definition

    template <typename T>
    T* as() {
        return std::get_if<T>(&node);
    }
    template <typename T>
    const T* as() const {
        return std::get_if<T>(&node);
    }
    template <typename T>
    bool is() const {
        return std::holds_alternative<T>(node);
    }
};

ParseValue make_uint(uint64_t value, int width_bits);
ParseValue make_record();
ParseValue make_array();
ParseValue make_vector();
ParseValue make_variant(std::string arm_name, int arm_index, ParseValue inner);

/// Structural equality: same shape, same numbers. Declared type names are
/// compared by the engine, not here.
bool equal_values(const ParseValue& a, const ParseValue& b);

/// Total serialized size of the value in bits. An unselected variant
/// contributes zero.
int64_t value_bits(const ParseValue& v);

/// Canonical one-line JSON. Records render fields in stored order; a variant
/// renders as {"arm":<name>,"value":<inner>}.
std::string render(const ParseValue& v);

}  // namespace msgc
