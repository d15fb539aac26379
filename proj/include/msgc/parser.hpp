#pragma once

#include <string>
#include <string_view>

#include "msgc/ast.hpp"
#include "msgc/diagnostics.hpp"
#include "msgc/support.hpp"

namespace msgc {

/// Parse one source text into a module. Stops at the first syntax error.
Expected<SpecModule, Diag> parse_spec(std::string_view source, const std::string& filename);

/// Parse an expression in isolation (test and tooling helper).
Expected<Expr, Diag> parse_expr_text(std::string_view source);

}  // namespace msgc
