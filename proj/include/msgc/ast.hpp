#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msgc/buffer_view.hpp"
#include "msgc/support.hpp"

namespace msgc {

// ---------------------------------------------------------------------------
// Expressions
// ---------------------------------------------------------------------------

struct Expr;

enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
enum class UnOp { Neg, Not };

const char* to_string(BinOp op);
const char* to_string(UnOp op);

/// How a leading path component was resolved during typecheck.
enum class RefKind { Unresolved, Field, Param };

struct IntLit {
    Int128 value = 0;
    bool operator==(const IntLit&) const = default;
};

struct BoolLit {
    bool value = false;
    bool operator==(const BoolLit&) const = default;
};

/// Dotted reference: first component is a field of the enclosing record or a
/// definition parameter; later components walk into record fields.
struct FieldRef {
    std::vector<std::string> path;
    RefKind kind = RefKind::Unresolved;
    bool operator==(const FieldRef&) const = default;
};

/// bytes(path): serialized size in bytes of an earlier field's value.
struct BytesOf {
    std::vector<std::string> path;
    bool operator==(const BytesOf&) const = default;
};

/// Call to a named predicate definition; the argument is a field path.
struct PredCall {
    std::string name;
    std::vector<Expr> args;
    bool operator==(const PredCall&) const;
};

struct Unary {
    UnOp op;
    std::vector<Expr> sub;  // exactly one
    bool operator==(const Unary&) const;
};

struct Binary {
    BinOp op;
    std::vector<Expr> sub;  // exactly two
    bool operator==(const Binary&) const;
};

struct Expr {
    std::variant<IntLit, BoolLit, FieldRef, BytesOf, PredCall, Unary, Binary> node;
    int line = 0;
    int col = 0;

    bool operator==(const Expr& o) const { return node == o.node; }
};

std::string to_string(const Expr& e);

// ---------------------------------------------------------------------------
// Type expressions
// ---------------------------------------------------------------------------

struct TypeExpr;
struct Decl;

struct UIntType {
    int width_bits = 0;
    ByteOrder order = ByteOrder::Msbf;
    bool operator==(const UIntType&) const = default;
};

struct ArrayType {
    std::vector<TypeExpr> elem;  // exactly one
    Expr count;
    bool operator==(const ArrayType&) const;
};

struct VectorType {
    std::vector<TypeExpr> elem;  // exactly one
    bool operator==(const VectorType&) const;
};

struct RecordType {
    std::vector<Decl> fields;
    bool operator==(const RecordType&) const;
};

/// One alternative of a variant: the arm name doubles as a reference to a
/// named type definition; the predicate ranges over the selector parameters.
struct VariantArm {
    std::string name;
    Expr pred;
    bool operator==(const VariantArm&) const = default;
};

struct VariantType {
    std::vector<std::string> selectors;  // names of enclosing def parameters
    std::vector<VariantArm> arms;
    bool operator==(const VariantType&) const = default;
};

/// Use of a named definition, with argument expressions for its parameters.
struct NamedRef {
    std::string name;
    std::vector<Expr> args;
    bool operator==(const NamedRef&) const = default;
};

struct TypeExpr {
    std::variant<UIntType, ArrayType, VectorType, RecordType, VariantType, NamedRef> node;
    int line = 0;
    int col = 0;

    bool operator==(const TypeExpr& o) const { return node == o.node; }
};

/// Record field declaration. `guard` is a boolean expression checked right
/// after the field is constructed; `constraint` narrows the field's view to
/// the given number of BYTES before the field is parsed or written.
struct Decl {
    std::string name;
    TypeExpr type;
    std::optional<Expr> guard;
    std::optional<Expr> constraint;
    int line = 0;
    int col = 0;

    bool operator==(const Decl& o) const {
        return name == o.name && type == o.type && guard == o.guard && constraint == o.constraint;
    }
};

// ---------------------------------------------------------------------------
// Definitions and modules
// ---------------------------------------------------------------------------

struct ParamDecl {
    std::string name;
    int width_bits = 0;
    bool operator==(const ParamDecl&) const = default;
};

struct TypeDef {
    std::string name;
    std::vector<ParamDecl> params;
    TypeExpr body;
    std::string file;
    int line = 0;
    int seq = 0;  // declaration order across the whole compilation

    bool operator==(const TypeDef& o) const {
        return name == o.name && params == o.params && body == o.body;
    }
};

struct PredDef {
    std::string name;
    std::string param_name;
    std::string param_type;
    Expr body;
    std::string file;
    int line = 0;
    int seq = 0;

    bool operator==(const PredDef& o) const {
        return name == o.name && param_name == o.param_name && param_type == o.param_type &&
               body == o.body;
    }
};

/// Parsed compilation unit(s): definitions in source order.
struct SpecModule {
    std::vector<TypeDef> types;
    std::vector<PredDef> preds;

    const TypeDef* find_type(const std::string& name) const;
    const PredDef* find_pred(const std::string& name) const;

    bool operator==(const SpecModule&) const = default;
};

std::string to_string(const TypeExpr& t);
std::string to_string(const SpecModule& m);

}  // namespace msgc
