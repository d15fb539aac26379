#include "msgc/safety.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace msgc {

namespace {

constexpr int64_t kFailSentinel = INT64_MAX / 4;

bool is_stream(OpKind k) { return k == OpKind::FromView || k == OpKind::ToView; }

class Verifier {
public:
    Verifier(const TypedModule& typed, const ModuleIR& mod) : typed_(typed), mod_(mod) {}

    SafetyProof run() {
        for (const auto& op : mod_.ops) {
            cur_ = &op;
            Ctx ctx;
            ctx.guaranteed = op.entry_requirement_bits;
            walk(op.body, ctx, op_label(op));
            if (is_stream(op.op))
                proof_.min_consumption[op_label(op)] = std::min(min_consume(op.body), kFailSentinel);
        }
        return std::move(proof_);
    }

private:
    struct Ctx {
        int64_t guaranteed = 0;
        std::set<std::string> tags;
    };

    struct ConstrainFrame {
        int64_t outer = 0;
        std::optional<int64_t> bytes;
    };

    const TypedModule& typed_;
    const ModuleIR& mod_;
    const OperationIR* cur_ = nullptr;
    SafetyProof proof_;
    std::map<std::string, int64_t> min_memo_;

    void report(SafetyErrorKind kind, const std::string& at, const std::string& message) {
        proof_.errors.push_back({kind, at, message});
    }

    bool is_variant_def(const std::string& name) const {
        const TypeDef* def = typed_.find_type(name);
        return def != nullptr && std::holds_alternative<VariantType>(def->body.node);
    }

    std::optional<int64_t> stream_size_bits(const std::string& type_name) const {
        const TypeInfo* info = typed_.find_info(type_name);
        return info == nullptr ? std::nullopt : info->const_size_bits;
    }

    // ------------------------------------------------------------------
    // Main walk: one lower bound on remaining window bits per point.
    // ------------------------------------------------------------------

    void walk(const InstrList& body, Ctx& ctx, const std::string& at_prefix) {
        std::vector<ConstrainFrame> windows;
        for (size_t i = 0; i < body.size(); ++i) {
            const Instr& in = body[i];
            std::string at = at_prefix + "+" + std::to_string(i);
            if (auto* g = in.as<GuardConst>()) {
                ctx.guaranteed = std::max(ctx.guaranteed, g->bits);
            } else if (in.is<GuardExpr>()) {
                // Dynamic amount: no static lower bound to record.
            } else if (auto* r = in.as<ReadInstr>()) {
                access(ctx, r->width_bits, at, "READ");
            } else if (auto* w = in.as<WriteInstr>()) {
                access(ctx, w->width_bits, at, "WRITE");
            } else if (auto* sa = in.as<SelectArmInstr>()) {
                ctx.tags.insert(sa->tag_slot);
            } else if (auto* c = in.as<ConstrainInstr>()) {
                auto folded = const_fold(typed_, {}, c->bytes_expr);
                std::optional<int64_t> bytes;
                if (folded) {
                    if (*folded < 0) {
                        std::ostringstream msg;
                        msg << "possible view underflow: CONSTRAIN at " << at << " narrows by "
                            << int128_to_string(*folded) << " bytes";
                        report(SafetyErrorKind::PossibleUnderflow, at, msg.str());
                    } else {
                        bytes = static_cast<int64_t>(*folded);
                    }
                }
                windows.push_back({ctx.guaranteed, bytes});
                ctx.guaranteed = bytes ? *bytes * 8 : 0;
            } else if (in.is<EndConstrainInstr>()) {
                if (!windows.empty()) {
                    ConstrainFrame f = windows.back();
                    windows.pop_back();
                    // The outer view advances by the full constraint amount.
                    ctx.guaranteed = f.bytes ? std::max<int64_t>(f.outer - *f.bytes * 8, 0) : 0;
                }
            } else if (auto* call = in.as<CallInstr>()) {
                check_call(*call, ctx, at);
            } else if (auto* lp = in.as<LoopInstr>()) {
                Ctx inner;
                inner.tags = ctx.tags;
                walk(lp->body, inner, at);
                if (is_stream(cur_->op) && min_consume(lp->body) <= 0) {
                    report(SafetyErrorKind::NonProgressLoop, at,
                           "loop body may consume no bits and never terminate");
                }
                ctx.guaranteed = 0;
            } else if (auto* rp = in.as<RepeatInstr>()) {
                check_repeat(*rp, ctx, at);
            } else if (auto* d = in.as<DispatchInstr>()) {
                std::optional<int64_t> after;
                for (size_t a = 0; a < d->arms.size(); ++a) {
                    Ctx arm_ctx = ctx;
                    walk(d->arms[a], arm_ctx, at + "." + std::to_string(a));
                    after = after ? std::min(*after, arm_ctx.guaranteed) : arm_ctx.guaranteed;
                }
                if (after) ctx.guaranteed = *after;
            }
            // Eval, SemCheck, Fail, Succeed and size descriptors have no
            // window effect.
        }
    }

    void access(Ctx& ctx, int width, const std::string& at, const char* what) {
        if (!is_stream(cur_->op)) return;
        if (ctx.guaranteed < width) {
            std::ostringstream msg;
            msg << "possible view overflow: " << what << " " << width << " at " << at
                << " requires " << width << " bits, " << ctx.guaranteed << " guaranteed";
            report(SafetyErrorKind::PossibleOverflow, at, msg.str());
        }
        ctx.guaranteed = std::max<int64_t>(ctx.guaranteed - width, 0);
    }

    void check_call(const CallInstr& call, Ctx& ctx, const std::string& at) {
        if (!is_stream(call.op)) return;  // value operations do not touch the window
        const OperationIR* callee = mod_.find(call.type_name, call.op, call.unguarded);
        int64_t need = callee ? callee->entry_requirement_bits : 0;
        if (ctx.guaranteed < need) {
            std::ostringstream msg;
            msg << "possible view overflow: CALL "
                << op_label(call.type_name, call.op, call.unguarded) << " at " << at
                << " requires " << need << " bits, " << ctx.guaranteed << " guaranteed";
            report(SafetyErrorKind::PossibleOverflow, at, msg.str());
        }
        if (is_variant_def(call.type_name)) {
            if (call.tag_slot.empty() || !ctx.tags.count(call.tag_slot)) {
                report(SafetyErrorKind::UninitializedVariantAccess, at,
                       "variant '" + call.type_name + "' used at " + at +
                           " without a preceding arm selection");
            }
        }
        auto size = stream_size_bits(call.type_name);
        ctx.guaranteed = size ? std::max<int64_t>(ctx.guaranteed - *size, 0) : 0;
    }

    void check_repeat(const RepeatInstr& rp, Ctx& ctx, const std::string& at) {
        auto k = const_fold(typed_, {}, rp.count);
        auto per = const_consume(rp.body);
        if (k && *k == 0) return;  // body never executes
        Ctx inner;
        inner.tags = ctx.tags;
        if (k && per) {
            // Every iteration i starts with at least guaranteed - i*per bits;
            // checking the last iteration covers all of them.
            inner.guaranteed = std::max<int64_t>(
                ctx.guaranteed - (static_cast<int64_t>(*k) - 1) * *per, 0);
        }
        walk(rp.body, inner, at);
        ctx.guaranteed = (k && per)
                             ? std::max<int64_t>(ctx.guaranteed - static_cast<int64_t>(*k) * *per, 0)
                             : 0;
    }

    // ------------------------------------------------------------------
    // Consumption bounds
    // ------------------------------------------------------------------

    // Lower bound on bits consumed by a successful complete execution.
    int64_t min_consume(const InstrList& body) {
        struct Frame {
            int64_t acc = 0;
            std::optional<int64_t> bytes;
        };
        std::vector<Frame> st{Frame{}};
        for (const auto& in : body) {
            if (auto* r = in.as<ReadInstr>()) {
                st.back().acc += r->width_bits;
            } else if (auto* w = in.as<WriteInstr>()) {
                st.back().acc += w->width_bits;
            } else if (auto* c = in.as<ConstrainInstr>()) {
                Frame f;
                auto folded = const_fold(typed_, {}, c->bytes_expr);
                if (folded && *folded >= 0) f.bytes = static_cast<int64_t>(*folded);
                st.push_back(f);
            } else if (in.is<EndConstrainInstr>()) {
                if (st.size() > 1) {
                    Frame f = st.back();
                    st.pop_back();
                    // The outer advance equals the constraint amount, which is
                    // at least what the inner section consumed.
                    int64_t adv = f.bytes ? *f.bytes * 8 : 0;
                    st.back().acc += std::max(adv, f.acc);
                }
            } else if (auto* call = in.as<CallInstr>()) {
                st.back().acc += call_min(*call);
            } else if (auto* rp = in.as<RepeatInstr>()) {
                auto k = const_fold(typed_, {}, rp->count);
                if (k && *k > 0) st.back().acc += static_cast<int64_t>(*k) * min_consume(rp->body);
            } else if (auto* d = in.as<DispatchInstr>()) {
                std::optional<int64_t> m;
                for (const auto& arm : d->arms) {
                    int64_t v = min_consume(arm);
                    m = m ? std::min(*m, v) : v;
                }
                if (m) st.back().acc += *m;
            } else if (in.is<FailInstr>()) {
                // No successful execution passes through an unconditional
                // failure; everything after it is vacuous.
                st.back().acc = kFailSentinel;
                break;
            }
            // Loops may run zero iterations: no contribution.
        }
        while (st.size() > 1) {
            Frame f = st.back();
            st.pop_back();
            st.back().acc += f.acc;
        }
        return std::min(st[0].acc, kFailSentinel);
    }

    int64_t call_min(const CallInstr& call) {
        if (!is_stream(call.op)) return 0;
        auto size = stream_size_bits(call.type_name);
        if (size) return *size;
        std::string key = op_label(call.type_name, call.op, false);
        auto it = min_memo_.find(key);
        if (it != min_memo_.end()) return it->second;
        min_memo_[key] = 0;  // cycle backstop; definitions are acyclic
        const OperationIR* callee = mod_.find(call.type_name, call.op, call.unguarded);
        if (callee == nullptr) callee = mod_.find(call.type_name, call.op, !call.unguarded);
        int64_t v = callee ? min_consume(callee->body) : 0;
        min_memo_[key] = v;
        return v;
    }

    std::optional<int64_t> const_consume(const InstrList& body) {
        return const_consumption(typed_, body);
    }
};

}  // namespace

const char* code_of(SafetyErrorKind k) {
    switch (k) {
        case SafetyErrorKind::PossibleOverflow: return "S001";
        case SafetyErrorKind::PossibleUnderflow: return "S002";
        case SafetyErrorKind::UninitializedVariantAccess: return "S003";
        case SafetyErrorKind::NonProgressLoop: return "S004";
    }
    return "S???";
}

std::string render(const SafetyError& e) {
    return std::string("error[") + code_of(e.kind) + "]: " + e.message;
}

SafetyProof verify(const TypedModule& typed, const ModuleIR& mod) {
    return Verifier(typed, mod).run();
}

std::optional<int64_t> const_consumption(const TypedModule& typed, const InstrList& body) {
    struct Frame {
        int64_t acc = 0;
        std::optional<int64_t> bytes;
    };
    std::vector<Frame> st{Frame{}};
    for (const auto& in : body) {
        if (auto* r = in.as<ReadInstr>()) {
            st.back().acc += r->width_bits;
        } else if (auto* w = in.as<WriteInstr>()) {
            st.back().acc += w->width_bits;
        } else if (auto* c = in.as<ConstrainInstr>()) {
            auto folded = const_fold(typed, {}, c->bytes_expr);
            if (!folded || *folded < 0) return std::nullopt;
            st.push_back({0, static_cast<int64_t>(*folded)});
        } else if (in.is<EndConstrainInstr>()) {
            if (st.size() < 2) return std::nullopt;
            Frame f = st.back();
            st.pop_back();
            st.back().acc += *f.bytes * 8;  // exact outer advance
        } else if (auto* call = in.as<CallInstr>()) {
            if (call->op != OpKind::FromView && call->op != OpKind::ToView) continue;
            const TypeInfo* info = typed.find_info(call->type_name);
            if (info == nullptr || !info->const_size_bits) return std::nullopt;
            st.back().acc += *info->const_size_bits;
        } else if (auto* rp = in.as<RepeatInstr>()) {
            auto k = const_fold(typed, {}, rp->count);
            auto per = const_consumption(typed, rp->body);
            if (!k || !per) return std::nullopt;
            st.back().acc += static_cast<int64_t>(*k) * *per;
        } else if (auto* d = in.as<DispatchInstr>()) {
            std::optional<int64_t> common;
            for (const auto& arm : d->arms) {
                auto v = const_consumption(typed, arm);
                if (!v) return std::nullopt;
                if (common && *common != *v) return std::nullopt;
                common = v;
            }
            if (common) st.back().acc += *common;
        } else if (in.is<LoopInstr>() || in.is<FailInstr>()) {
            return std::nullopt;
        }
    }
    if (st.size() != 1) return std::nullopt;
    return st[0].acc;
}

}  // namespace msgc
