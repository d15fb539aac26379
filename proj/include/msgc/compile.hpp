#pragma once

#include <string>
#include <vector>

#include "msgc/csg.hpp"
#include "msgc/diagnostics.hpp"
#include "msgc/ir.hpp"
#include "msgc/optimizer.hpp"
#include "msgc/safety.hpp"
#include "msgc/typecheck.hpp"

namespace msgc {

struct SourceFile {
    std::string name;
    std::string text;
};

struct CompileOptions {
    bool optimize = true;
};

/// Output of the full pipeline: the typed module, the shipped instruction
/// stream and the stream as synthesized, the safety proof covering the
/// shipped stream, the size graph, and the optimizer's counters.
struct CompiledModule {
    TypedModule typed;
    ModuleIR ir;
    ModuleIR raw_ir;
    SafetyProof proof;
    Csg csg;
    OptStats stats;
};

/// Parse, typecheck, synthesize, verify, optimize, and re-verify the given
/// sources as one compilation. Definitions may reference each other across
/// files in declaration order; names must be unique over the whole set.
Expected<CompiledModule, std::vector<Diag>> compile_sources(const std::vector<SourceFile>& sources,
                                                            const CompileOptions& opts = {});

}  // namespace msgc
