#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msgc/buffer_view.hpp"
#include "msgc/ir.hpp"
#include "msgc/typecheck.hpp"
#include "msgc/value.hpp"

namespace msgc {

/// One runtime fault: its class, the definition whose operation raised it,
/// the dotted path of the value element involved, and the absolute bit offset
/// the cursor had reached.
struct Violation {
    FailKind kind = FailKind::Overflow;
    std::string type_name;
    std::string path;
    int64_t offset_bits = 0;
    std::string detail;
    bool defensive = false;  // raised by a check that static safety already covers
};

std::string to_string(const Violation& v);

struct ExecStats {
    int64_t guard_checks = 0;  // structural guard evaluations, plus the root entry check
    int64_t instructions = 0;
};

struct ExecOptions {
    /// Propagate element failures out of greedy sequences instead of rolling
    /// back to the last complete element.
    bool strict_vectors = false;
    /// Instruction budget per operation invocation; exhausting it raises a
    /// defensive Overflow.
    int64_t fuel = 50'000'000;
};

struct ParseOutcome {
    std::optional<ParseValue> value;
    std::optional<Violation> violation;
    int64_t consumed_bits = 0;  // zero when the parse failed
    ExecStats stats;

    bool ok() const { return value.has_value(); }
};

struct WriteOutcome {
    std::optional<Violation> violation;
    int64_t written_bits = 0;
    ExecStats stats;

    bool ok() const { return !violation.has_value(); }
};

/// Executes the operations of a compiled module. Parameterized definitions
/// take their arguments positionally; a variant invoked directly has its arm
/// selected from those arguments before the body runs.
class Engine {
public:
    Engine(const TypedModule& typed, const ModuleIR& mod, ExecOptions opts = {})
        : typed_(typed), mod_(mod), opts_(opts) {}

    ParseOutcome from_view(const std::string& type, View view,
                           const std::vector<uint64_t>& args = {}) const;

    WriteOutcome to_view(const std::string& type, MutableView view, const ParseValue& value,
                         const std::vector<uint64_t>& args = {}) const;

    /// Serialize into a fresh buffer sized by bytes().
    Expected<Buffer, Violation> to_buffer(const std::string& type, const ParseValue& value,
                                          const std::vector<uint64_t>& args = {}) const;

    /// Serialized size of the value in whole bytes.
    Expected<int64_t, Violation> bytes(const std::string& type, const ParseValue& value) const;

    /// Structural equality. Values that declare different type names do not
    /// compare; that is reported as a fault, not as inequality.
    Expected<bool, Violation> equal(const std::string& type, const ParseValue& a,
                                    const ParseValue& b) const;
    Expected<bool, Violation> not_equal(const std::string& type, const ParseValue& a,
                                        const ParseValue& b) const;

    std::string to_string_value(const ParseValue& value) const;

    const TypedModule& typed() const { return typed_; }
    const ModuleIR& module_ir() const { return mod_; }
    const ExecOptions& options() const { return opts_; }

private:
    const TypedModule& typed_;
    const ModuleIR& mod_;
    ExecOptions opts_;
};

}  // namespace msgc
