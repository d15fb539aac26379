#include "msgc/optimizer.hpp"

#include <algorithm>
#include <set>

#include "msgc/safety.hpp"

namespace msgc {

namespace {

bool is_stream(OpKind k) { return k == OpKind::FromView || k == OpKind::ToView; }

class Optimizer {
public:
    Optimizer(const TypedModule& typed, ModuleIR mod) : typed_(typed), mod_(std::move(mod)) {}

    ModuleIR run(OptStats* stats) {
        if (stats) {
            for (const auto& op : mod_.ops)
                stats->per_op_before[op_label(op)] = static_guard_count(op.body);
            for (const auto& [k, v] : stats->per_op_before) stats->guards_before += v;
        }
        for (int round = 0; round < 32; ++round) {
            bool changed = false;
            for (auto& op : mod_.ops) changed |= fuse_body(op.body);
            changed |= lift_round();
            if (stats) stats->rounds = round + 1;
            if (!changed) break;
        }
        if (stats) {
            for (const auto& op : mod_.ops)
                stats->per_op_after[op_label(op)] = static_guard_count(op.body);
            for (const auto& [k, v] : stats->per_op_after) stats->guards_after += v;
        }
        return std::move(mod_);
    }

private:
    const TypedModule& typed_;
    ModuleIR mod_;

    std::optional<int64_t> stream_size_bits(const std::string& type_name) const {
        const TypeInfo* info = typed_.find_info(type_name);
        return info == nullptr ? std::nullopt : info->const_size_bits;
    }

    // ------------------------------------------------------------------
    // Fusing
    // ------------------------------------------------------------------

    // A later GuardConst{b} with `consumed` constant bits since the anchor
    // guard folds into the anchor as max(anchor, consumed + b): once the
    // anchor passes, consuming `consumed` bits still leaves b available.
    bool fuse_body(InstrList& body) {
        bool changed = false;
        InstrList out;
        out.reserve(body.size());
        int anchor = -1;
        int64_t consumed = 0;
        auto close = [&] { anchor = -1; consumed = 0; };
        for (auto& in : body) {
            if (auto* g = in.as<GuardConst>()) {
                if (anchor >= 0) {
                    auto* a = out[static_cast<size_t>(anchor)].as<GuardConst>();
                    a->bits = std::max(a->bits, consumed + g->bits);
                    changed = true;
                    continue;
                }
                anchor = static_cast<int>(out.size());
                consumed = 0;
                out.push_back(std::move(in));
                continue;
            }
            if (auto* r = in.as<ReadInstr>()) {
                consumed += r->width_bits;
            } else if (auto* w = in.as<WriteInstr>()) {
                consumed += w->width_bits;
            } else if (in.is<EvalInstr>() || in.is<SemCheckInstr>() || in.is<SelectArmInstr>() ||
                       in.is<AddBytesConst>() || in.is<AddBytesField>() || in.is<AddBytesElems>() ||
                       in.is<AddBytesArm>() || in.is<SucceedInstr>()) {
                // no window effect
            } else if (auto* call = in.as<CallInstr>()) {
                if (is_stream(call->op)) {
                    auto size = stream_size_bits(call->type_name);
                    if (size)
                        consumed += *size;
                    else
                        close();
                }
            } else if (auto* lp = in.as<LoopInstr>()) {
                changed |= fuse_body(lp->body);
                close();
            } else if (auto* rp = in.as<RepeatInstr>()) {
                changed |= fuse_body(rp->body);
                auto k = const_fold(typed_, {}, rp->count);
                auto per = const_consumption(typed_, rp->body);
                if (k && per)
                    consumed += static_cast<int64_t>(*k) * *per;
                else
                    close();
            } else if (auto* d = in.as<DispatchInstr>()) {
                std::optional<int64_t> common;
                bool uniform = true;
                for (auto& arm : d->arms) {
                    changed |= fuse_body(arm);
                    auto v = const_consumption(typed_, arm);
                    if (!v || (common && *common != *v)) uniform = false;
                    if (v && !common) common = v;
                }
                if (uniform && common)
                    consumed += *common;
                else
                    close();
            } else {
                // GuardExpr, Constrain, EndConstrain, Fail: window or control
                // boundary, the anchor cannot cover anything past it.
                close();
            }
            out.push_back(std::move(in));
        }
        body = std::move(out);
        return changed;
    }

    // ------------------------------------------------------------------
    // Lifting
    // ------------------------------------------------------------------

    struct LiftTarget {
        std::string type_name;
        OpKind op;
        int64_t bits;
        bool operator<(const LiftTarget& o) const {
            return std::tie(type_name, op, bits) < std::tie(o.type_name, o.op, o.bits);
        }
    };

    bool lift_round() {
        // Phase 1: find guarded callees whose body opens with a constant guard
        // and that are called from at least one non-loop site.
        std::set<LiftTarget> targets;
        for (const auto& op : mod_.ops) collect_targets(op.body, false, targets);
        if (targets.empty()) return false;

        // Phase 2: ensure each target has an unguarded twin.
        bool changed = false;
        for (const auto& t : targets) {
            if (mod_.find(t.type_name, t.op, true) != nullptr) continue;
            const OperationIR* callee = mod_.find(t.type_name, t.op, false);
            OperationIR twin = *callee;
            twin.unguarded = true;
            twin.entry_requirement_bits = t.bits;
            twin.body.erase(twin.body.begin());
            mod_.ops.push_back(std::move(twin));
            changed = true;
        }

        // Phase 3: rewrite non-loop call sites to guard-then-unguarded-call.
        for (auto& op : mod_.ops) changed |= rewrite_sites(op.body, false, targets);
        return changed;
    }

    void collect_targets(const InstrList& body, bool in_loop, std::set<LiftTarget>& out) const {
        for (const auto& in : body) {
            if (auto* call = in.as<CallInstr>()) {
                if (in_loop || call->unguarded || !is_stream(call->op)) continue;
                const OperationIR* callee = mod_.find(call->type_name, call->op, false);
                if (callee == nullptr || callee->body.empty()) continue;
                if (auto* g = callee->body.front().as<GuardConst>())
                    out.insert({call->type_name, call->op, g->bits});
            } else if (auto* lp = in.as<LoopInstr>()) {
                collect_targets(lp->body, true, out);
            } else if (auto* rp = in.as<RepeatInstr>()) {
                collect_targets(rp->body, true, out);
            } else if (auto* d = in.as<DispatchInstr>()) {
                for (const auto& a : d->arms) collect_targets(a, in_loop, out);
            }
        }
    }

    bool rewrite_sites(InstrList& body, bool in_loop, const std::set<LiftTarget>& targets) {
        bool changed = false;
        InstrList out;
        out.reserve(body.size());
        for (auto& in : body) {
            if (auto* call = in.as<CallInstr>();
                call != nullptr && !in_loop && !call->unguarded && is_stream(call->op)) {
                auto it = std::find_if(targets.begin(), targets.end(), [&](const LiftTarget& t) {
                    return t.type_name == call->type_name && t.op == call->op;
                });
                if (it != targets.end()) {
                    out.push_back(Instr{GuardConst{it->bits}});
                    call->unguarded = true;
                    out.push_back(std::move(in));
                    changed = true;
                    continue;
                }
            } else if (auto* lp = in.as<LoopInstr>()) {
                changed |= rewrite_sites(lp->body, true, targets);
            } else if (auto* rp = in.as<RepeatInstr>()) {
                changed |= rewrite_sites(rp->body, true, targets);
            } else if (auto* d = in.as<DispatchInstr>()) {
                for (auto& a : d->arms) changed |= rewrite_sites(a, in_loop, targets);
            }
            out.push_back(std::move(in));
        }
        body = std::move(out);
        return changed;
    }
};

}  // namespace

ModuleIR optimize(const TypedModule& typed, const ModuleIR& input, OptStats* stats) {
    return Optimizer(typed, input).run(stats);
}

}  // namespace msgc
