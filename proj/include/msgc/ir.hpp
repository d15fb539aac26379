#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "msgc/ast.hpp"

namespace msgc {

/// The five operations synthesized for every type definition.
enum class OpKind { Bytes, FromView, ToView, Equal, ToString };

const char* to_string(OpKind k);

/// Runtime failure classes. Overflow and Underflow are structural (the view
/// cannot satisfy the access), InvalidVariant is a failed arm selection,
/// Semantic is a failed value guard.
enum class FailKind { Overflow, Underflow, InvalidVariant, Semantic };

const char* to_string(FailKind k);

struct Instr;
using InstrList = std::vector<Instr>;

// --- structural guards -----------------------------------------------------

/// Fail with Overflow unless the current window holds at least `bits`.
struct GuardConst {
    int64_t bits = 0;
    bool operator==(const GuardConst&) const = default;
};

/// Dynamic guard: the required bit count is evaluated at runtime.
struct GuardExpr {
    Expr bits_expr;
    bool operator==(const GuardExpr&) const = default;
};

// --- data movement ----------------------------------------------------------

struct ReadInstr {
    std::string slot;
    int width_bits = 0;
    ByteOrder order = ByteOrder::Msbf;
    bool operator==(const ReadInstr&) const = default;
};

struct WriteInstr {
    std::string slot;
    int width_bits = 0;
    ByteOrder order = ByteOrder::Msbf;
    bool operator==(const WriteInstr&) const = default;
};

/// slot := expr over previously constructed values and parameters.
struct EvalInstr {
    std::string slot;
    Expr expr;
    bool operator==(const EvalInstr&) const = default;
};

// --- checks and windows ------------------------------------------------------

/// Fail with Semantic unless the guard expression holds.
struct SemCheckInstr {
    Expr expr;
    std::string field_path;
    bool operator==(const SemCheckInstr&) const = default;
};

/// Evaluate the named variant's arm predicates (declaration order, first true
/// wins) with the given selector arguments; store the arm index in tag_slot.
/// Fail with InvalidVariant when no predicate holds.
struct SelectArmInstr {
    std::string variant_type;
    std::vector<Expr> args;
    std::string tag_slot;
    bool operator==(const SelectArmInstr&) const = default;
};

/// Narrow the window to bytes_expr BYTES for the instructions up to the
/// matching EndConstrain. Fail with Underflow when the amount is negative or
/// exceeds the window.
struct ConstrainInstr {
    std::string field;  // slot whose window this narrows, for violation paths
    Expr bytes_expr;
    bool operator==(const ConstrainInstr&) const = default;
};

/// Pop the innermost constrained window. The outer view advances by the full
/// constraint amount; unread remainder is recorded as slack (and zero-filled
/// on the write path).
struct EndConstrainInstr {
    bool operator==(const EndConstrainInstr&) const = default;
};

// --- control ------------------------------------------------------------------

/// Invoke another type's operation. args bind the callee's parameters;
/// tag_slot carries a previously selected variant arm. `unguarded` targets the
/// callee version whose entry guard was lifted to this call site.
struct CallInstr {
    std::string type_name;
    OpKind op = OpKind::FromView;
    std::vector<Expr> args;
    std::string dest_slot;
    std::string tag_slot;
    bool unguarded = false;
    bool operator==(const CallInstr&) const = default;
};

/// Greedy sequence: run the body while the window has bits left. Each
/// iteration must consume at least one bit. On the write path the iteration
/// count is the element count of the value instead.
struct LoopInstr {
    std::string dest_slot;
    InstrList body;
    bool operator==(const LoopInstr&) const;
};

/// Fixed-count sequence (arrays). count is evaluated once, before the body.
struct RepeatInstr {
    std::string dest_slot;
    Expr count;
    InstrList body;
    bool operator==(const RepeatInstr&) const;
};

/// Variant body: run the arm selected by the bound tag.
struct DispatchInstr {
    std::string variant_type;
    std::vector<InstrList> arms;
    bool operator==(const DispatchInstr&) const;
};

struct FailInstr {
    FailKind kind = FailKind::Overflow;
    std::string detail;
    bool operator==(const FailInstr&) const = default;
};

struct SucceedInstr {
    bool operator==(const SucceedInstr&) const = default;
};

// --- size descriptors (bytes operation) ---------------------------------------

struct AddBytesConst {
    int64_t bits = 0;
    bool operator==(const AddBytesConst&) const = default;
};

struct AddBytesField {
    std::string field;
    bool operator==(const AddBytesField&) const = default;
};

struct AddBytesElems {
    bool operator==(const AddBytesElems&) const = default;
};

/// Selected arm's size; an unselected variant contributes zero.
struct AddBytesArm {
    bool operator==(const AddBytesArm&) const = default;
};

struct Instr {
    std::variant<GuardConst, GuardExpr, ReadInstr, WriteInstr, EvalInstr, SemCheckInstr,
                 SelectArmInstr, ConstrainInstr, EndConstrainInstr, CallInstr, LoopInstr,
                 RepeatInstr, DispatchInstr, FailInstr, SucceedInstr, AddBytesConst, AddBytesField,
                 AddBytesElems, AddBytesArm>
        node;

    bool operator==(const Instr& o) const { return node == o.node; }

    template <typename T>
    const T* as() const {
        return std::get_if<T>(&node);
    }
    template <typename T>
    T* as() {
        return std::get_if<T>(&node);
    }
    template <typename T>
    bool is() const {
        return std::holds_alternative<T>(node);
    }
};

/// One synthesized operation. `unguarded` marks the variant whose leading
/// guard was lifted to call sites; entry_requirement_bits is the window
/// precondition its body assumes.
struct OperationIR {
    std::string type_name;
    OpKind op = OpKind::FromView;
    bool unguarded = false;
    int64_t entry_requirement_bits = 0;
    std::optional<int64_t> constant_bytes;  // bytes op: fixed serialized size
    InstrList body;
};

std::string op_label(const OperationIR& op);
std::string op_label(const std::string& type_name, OpKind op, bool unguarded = false);

struct ModuleIR {
    std::vector<OperationIR> ops;

    const OperationIR* find(const std::string& type_name, OpKind op, bool unguarded = false) const;
    OperationIR* find(const std::string& type_name, OpKind op, bool unguarded = false);
};

std::string dump(const OperationIR& op);
std::string dump(const ModuleIR& mod);

/// Static count of guard instructions (GuardConst/GuardExpr) in a body,
/// including nested bodies.
int64_t static_guard_count(const InstrList& body);

}  // namespace msgc
