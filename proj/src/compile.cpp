#include "msgc/compile.hpp"

#include "msgc/parser.hpp"
#include "msgc/synthesis.hpp"

namespace msgc {

namespace {

std::vector<Diag> proof_diags(const SafetyProof& proof) {
    std::vector<Diag> ds;
    for (const auto& e : proof.errors) {
        Diag d;
        d.severity = Severity::Error;
        d.code = code_of(e.kind);
        d.message = e.message;
        ds.push_back(std::move(d));
    }
    return ds;
}

}  // namespace

Expected<CompiledModule, std::vector<Diag>> compile_sources(const std::vector<SourceFile>& sources,
                                                            const CompileOptions& opts) {
    SpecModule merged;
    int seq_base = 0;
    for (const auto& src : sources) {
        auto parsed = parse_spec(src.text, src.name);
        if (!parsed.ok()) return std::vector<Diag>{parsed.error()};
        SpecModule m = std::move(parsed).value();
        int next_base = seq_base;
        for (auto& t : m.types) {
            t.seq += seq_base;
            next_base = std::max(next_base, t.seq + 1);
            merged.types.push_back(std::move(t));
        }
        for (auto& p : m.preds) {
            p.seq += seq_base;
            next_base = std::max(next_base, p.seq + 1);
            merged.preds.push_back(std::move(p));
        }
        seq_base = next_base;
    }

    auto typed = typecheck(merged);
    if (!typed.ok()) return typed.error();

    CompiledModule out;
    out.typed = std::move(typed).value();
    out.raw_ir = synthesize(out.typed);

    SafetyProof raw_proof = verify(out.typed, out.raw_ir);
    if (!raw_proof.ok()) return proof_diags(raw_proof);

    if (opts.optimize) {
        out.ir = optimize(out.typed, out.raw_ir, &out.stats);
        out.proof = verify(out.typed, out.ir);
        if (!out.proof.ok()) {
            // The optimizer must preserve provability; a regression here is a
            // bug in this compiler, not in the input.
            std::vector<Diag> ds;
            Diag d;
            d.severity = Severity::Error;
            d.code = "I001";
            d.message =
                "internal error: optimized stream failed re-verification: " +
                out.proof.errors.front().message;
            ds.push_back(std::move(d));
            return ds;
        }
    } else {
        out.ir = out.raw_ir;
        out.proof = std::move(raw_proof);
    }

    out.csg = build_csg(out.typed, out.ir);
    return out;
}

}  // namespace msgc
