#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "msgc/ir.hpp"
#include "msgc/typecheck.hpp"

namespace msgc {

struct OptStats {
    int64_t guards_before = 0;
    int64_t guards_after = 0;
    std::map<std::string, int64_t> per_op_before;
    std::map<std::string, int64_t> per_op_after;
    int rounds = 0;
};

/// Reduce static guard count by alternating two rewrites to a fixpoint:
///  - lifting: a callee whose body opens with GuardConst has that guard moved
///    to its call sites; the callee is split into the original guarded version
///    (kept as the public entry) and an unguarded twin carrying the guard as
///    an entry requirement. Call sites inside element loops are not lifted:
///    their guard must run once per iteration.
///  - fusing: within one window, consecutive constant guards separated only by
///    constant-consumption instructions collapse into the earliest one.
/// The result must be re-verified by the caller; optimization never changes
/// which inputs parse, only how many guard checks run.
ModuleIR optimize(const TypedModule& typed, const ModuleIR& input, OptStats* stats = nullptr);

}  // namespace msgc
