#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msgc/ir.hpp"
#include "msgc/typecheck.hpp"

namespace msgc {

enum class SafetyErrorKind {
    PossibleOverflow,           // S001: read/write/call may exceed the window
    PossibleUnderflow,          // S002: constraint amount is provably negative
    UninitializedVariantAccess, // S003: variant operation without arm selection
    NonProgressLoop,            // S004: loop body may consume no bits
};

const char* code_of(SafetyErrorKind k);

struct SafetyError {
    SafetyErrorKind kind;
    std::string at;  // op label plus instruction index path, e.g. Hdr.from_view+3
    std::string message;
};

std::string render(const SafetyError& e);

/// Result of verifying a module. min_consumption maps each stream operation
/// to a lower bound on the bits it consumes on a successful run.
struct SafetyProof {
    std::vector<SafetyError> errors;
    std::map<std::string, int64_t> min_consumption;

    bool ok() const { return errors.empty(); }
};

/// Prove every read, write, and call is covered by a guard, constraints are
/// not provably negative, variant operations are reached through selection,
/// and greedy loops make progress. The analysis keeps one number per program
/// point: a lower bound on the bits guaranteed to remain in the window.
SafetyProof verify(const TypedModule& typed, const ModuleIR& mod);

/// Exact number of bits a body consumes from its window when that number is
/// static; nullopt for value-dependent bodies (loops, dynamic constraints,
/// calls to types without a constant size).
std::optional<int64_t> const_consumption(const TypedModule& typed, const InstrList& body);

}  // namespace msgc
