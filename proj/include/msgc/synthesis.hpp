#pragma once

#include "msgc/ir.hpp"
#include "msgc/typecheck.hpp"

namespace msgc {

/// Lower a typechecked module to operation IR. Every type definition yields
/// five operations: bytes, from_view, to_view, equal, to_string. Bodies for
/// equal/to_string list the named components they recurse into; the engine
/// evaluates those operations directly over values.
ModuleIR synthesize(const TypedModule& typed);

}  // namespace msgc
