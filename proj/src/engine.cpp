#include "msgc/engine.hpp"

#include <cassert>
#include <deque>
#include <map>

namespace msgc {

std::string to_string(const Violation& v) {
    std::string s = to_string(v.kind);
    if (!v.type_name.empty()) {
        s += " in ";
        s += v.type_name;
    }
    if (!v.path.empty()) {
        s += " at ";
        s += v.path;
    }
    s += " (bit " + std::to_string(v.offset_bits) + ")";
    if (!v.detail.empty()) {
        s += ": ";
        s += v.detail;
    }
    if (v.defensive) s += " [defensive]";
    return s;
}

namespace {

std::vector<std::string> split_dotted(const std::string& s) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t dot; (dot = s.find('.', start)) != std::string::npos; start = dot + 1)
        parts.push_back(s.substr(start, dot - start));
    parts.push_back(s.substr(start));
    return parts;
}

std::string join_dotted(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) {
        if (!s.empty()) s += '.';
        s += p;
    }
    return s;
}

/// Slot paths may start with a positional marker (@self, @elem, @inner) that
/// has no place in a user-facing value path.
std::string strip_marker(const std::string& slot) {
    if (slot.empty() || slot[0] != '@') return slot;
    size_t dot = slot.find('.');
    return dot == std::string::npos ? std::string() : slot.substr(dot + 1);
}

std::string join_path(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (b[0] == '[') return a + b;
    return a + "." + b;
}

FailKind fail_kind_of(ViewError e) {
    switch (e) {
        case ViewError::Overflow: return FailKind::Overflow;
        case ViewError::Underflow: return FailKind::Underflow;
        case ViewError::Domain: return FailKind::Semantic;
    }
    return FailKind::Overflow;
}

/// A predicate's parameter bound to a resolved value for the duration of one
/// predicate body evaluation.
struct Binding {
    const std::string* name;
    const ParseValue* value;
};

template <typename ViewT>
class Exec {
public:
    Exec(const TypedModule& typed, const ModuleIR& mod, const ExecOptions& opts, ExecStats& stats)
        : typed_(typed), mod_(mod), opts_(opts), stats_(stats) {}

    struct Frame {
        const OperationIR* op = nullptr;
        const TypeDef* def = nullptr;
        std::map<std::string, uint64_t> params;
        ParseValue* root = nullptr;
        std::optional<int> bound_tag;
        std::map<std::string, int> sel_tags;
        std::vector<ParseValue*> elems;     // innermost element under construction last
        std::deque<ParseValue> owned;       // detached element scratch (read path)
    };

    using Result = Expected<ViewT, Violation>;

    Result run_op(const OperationIR& op, Frame& f, ViewT view, bool count_entry) {
        f.op = &op;
        if (op.entry_requirement_bits > 0) {
            if (count_entry) ++stats_.guard_checks;
            if (view.available_bits() < op.entry_requirement_bits)
                return vio(FailKind::Overflow, f, "", view,
                           need_msg(op.entry_requirement_bits, view), !count_entry);
        }
        return run_body(op.body, f, view);
    }

    /// First arm whose predicate holds under the given selector parameters.
    Expected<int, std::string> pick_arm(const TypeDef& vdef,
                                        const std::map<std::string, uint64_t>& params) {
        const auto* vt = std::get_if<VariantType>(&vdef.body.node);
        assert(vt != nullptr);
        Frame pf;
        pf.params = params;
        for (size_t i = 0; i < vt->arms.size(); ++i) {
            auto r = eval(vt->arms[i].pred, pf, nullptr);
            if (!r.ok()) return r.error();
            if (r.value() != 0) return static_cast<int>(i);
        }
        std::string sel = "no arm matches";
        const char* sep = ": ";
        for (const auto& p : vdef.params) {
            sel += sep;
            sel += p.name + "=" + std::to_string(params.count(p.name) ? params.at(p.name) : 0);
            sep = ", ";
        }
        return sel;
    }

    Expected<Int128, std::string> eval(const Expr& e, const Frame& f, const Binding* b) const {
        if (const auto* il = std::get_if<IntLit>(&e.node)) return il->value;
        if (const auto* bl = std::get_if<BoolLit>(&e.node)) return Int128(bl->value ? 1 : 0);
        if (const auto* fr = std::get_if<FieldRef>(&e.node)) {
            auto v = resolve_ref(fr->path, fr->kind, f, b);
            if (!v.ok()) return v.error();
            if (v.value().is_param) return v.value().param_value;
            const auto* u = v.value().u;
            if (u == nullptr)
                return "reference '" + join_dotted(fr->path) + "' is not an integer";
            return Int128(u->value);
        }
        if (const auto* bo = std::get_if<BytesOf>(&e.node)) {
            auto v = resolve_value(bo->path, RefKind::Field, f, b);
            if (!v.ok()) return v.error();
            int64_t bits = value_bits(*v.value());
            if (bits % 8 != 0)
                return "size of '" + join_dotted(bo->path) + "' is not a whole number of bytes";
            return Int128(bits / 8);
        }
        if (const auto* pc = std::get_if<PredCall>(&e.node)) {
            const PredDef* pd = typed_.module.find_pred(pc->name);
            if (pd == nullptr) return "unknown predicate '" + pc->name + "'";
            if (pc->args.size() != 1) return "predicate '" + pc->name + "' takes one argument";
            const auto* ar = std::get_if<FieldRef>(&pc->args[0].node);
            if (ar == nullptr) return std::string("predicate argument must be a field");
            auto v = resolve_value(ar->path, ar->kind, f, b);
            if (!v.ok()) return v.error();
            Binding nb{&pd->param_name, v.value()};
            return eval(pd->body, f, &nb);
        }
        if (const auto* un = std::get_if<Unary>(&e.node)) {
            auto v = eval(un->sub[0], f, b);
            if (!v.ok()) return v;
            if (un->op == UnOp::Not) return Int128(v.value() == 0 ? 1 : 0);
            auto r = checked_sub(0, v.value());
            if (!r) return std::string("arithmetic overflow");
            return *r;
        }
        const auto* bi = std::get_if<Binary>(&e.node);
        assert(bi != nullptr);
        auto lhs = eval(bi->sub[0], f, b);
        if (!lhs.ok()) return lhs;
        Int128 l = lhs.value();
        if (bi->op == BinOp::And) {
            if (l == 0) return Int128(0);
            auto rhs = eval(bi->sub[1], f, b);
            if (!rhs.ok()) return rhs;
            return Int128(rhs.value() != 0 ? 1 : 0);
        }
        if (bi->op == BinOp::Or) {
            if (l != 0) return Int128(1);
            auto rhs = eval(bi->sub[1], f, b);
            if (!rhs.ok()) return rhs;
            return Int128(rhs.value() != 0 ? 1 : 0);
        }
        auto rhs = eval(bi->sub[1], f, b);
        if (!rhs.ok()) return rhs;
        Int128 r = rhs.value();
        std::optional<Int128> out;
        switch (bi->op) {
            case BinOp::Add: out = checked_add(l, r); break;
            case BinOp::Sub: out = checked_sub(l, r); break;
            case BinOp::Mul: out = checked_mul(l, r); break;
            case BinOp::Div:
                if (r == 0) return std::string("division by zero");
                out = checked_div(l, r);
                break;
            case BinOp::Eq: return Int128(l == r ? 1 : 0);
            case BinOp::Ne: return Int128(l != r ? 1 : 0);
            case BinOp::Lt: return Int128(l < r ? 1 : 0);
            case BinOp::Le: return Int128(l <= r ? 1 : 0);
            case BinOp::Gt: return Int128(l > r ? 1 : 0);
            case BinOp::Ge: return Int128(l >= r ? 1 : 0);
            default: break;
        }
        if (!out) return std::string("arithmetic overflow");
        return *out;
    }

private:
    const TypedModule& typed_;
    const ModuleIR& mod_;
    const ExecOptions& opts_;
    ExecStats& stats_;

    struct RefResult {
        bool is_param = false;
        Int128 param_value = 0;
        const UIntV* u = nullptr;  // integer slot value when not a parameter
    };

    static std::string need_msg(int64_t need, const ViewT& view) {
        return "requires " + std::to_string(need) + " bits, " +
               std::to_string(view.available_bits()) + " available";
    }

    Violation vio(FailKind k, const Frame& f, std::string path, const ViewT& view,
                  std::string detail, bool defensive = false) const {
        Violation v;
        v.kind = k;
        v.type_name = f.op != nullptr ? f.op->type_name : (f.def != nullptr ? f.def->name : "");
        v.path = std::move(path);
        v.offset_bits = view.head_bits();
        v.detail = std::move(detail);
        v.defensive = defensive;
        return v;
    }

    // --- slot resolution ---------------------------------------------------

    const ParseValue* find_path(const Frame& f, const std::vector<std::string>& parts) const {
        size_t i = 0;
        const ParseValue* cur = f.root;
        if (parts[0] == "@self") {
            i = 1;
        } else if (parts[0] == "@elem") {
            if (f.elems.empty()) return nullptr;
            cur = f.elems.back();
            i = 1;
        } else if (parts[0] == "@inner") {
            const ParseValue* rootp = f.root;
            const auto* x = rootp != nullptr ? rootp->as<VariantV>() : nullptr;
            if (x == nullptr || x->inner.empty()) return nullptr;
            cur = &x->inner[0];
            i = 1;
        }
        for (; i < parts.size(); ++i) {
            if (cur == nullptr) return nullptr;
            const auto* r = cur->as<RecordV>();
            if (r == nullptr) return nullptr;
            cur = r->find(parts[i]);
        }
        return cur;
    }

    /// Resolve a slot for writing, creating record nodes along the way. Field
    /// nodes appear in first-write order, which the instruction stream keeps
    /// equal to declaration order.
    ParseValue* ensure_path(Frame& f, const std::vector<std::string>& parts) const {
        size_t i = 0;
        ParseValue* cur = f.root;
        if (parts[0] == "@self") {
            i = 1;
        } else if (parts[0] == "@elem") {
            if (f.elems.empty()) return nullptr;
            cur = f.elems.back();
            i = 1;
        } else if (parts[0] == "@inner") {
            ParseValue* rootp = f.root;
            auto* x = rootp != nullptr ? rootp->as<VariantV>() : nullptr;
            if (x == nullptr) return nullptr;
            if (x->inner.empty()) x->inner.emplace_back();
            cur = &x->inner[0];
            i = 1;
        }
        for (; i < parts.size(); ++i) {
            if (cur == nullptr) return nullptr;
            if (cur->is<std::monostate>()) cur->node = RecordV{};
            auto* r = cur->as<RecordV>();
            if (r == nullptr) return nullptr;
            ParseValue* nxt = r->find(parts[i]);
            if (nxt == nullptr) {
                r->fields.emplace_back(parts[i], ParseValue{});
                nxt = &r->fields.back().second;
            }
            cur = nxt;
        }
        return cur;
    }

    Expected<RefResult, std::string> resolve_ref(const std::vector<std::string>& path, RefKind kind,
                                                 const Frame& f, const Binding* b) const {
        if (b != nullptr && path[0] == *b->name) {
            const ParseValue* cur = b->value;
            for (size_t i = 1; i < path.size() && cur != nullptr; ++i) {
                const auto* r = cur->as<RecordV>();
                cur = r != nullptr ? r->find(path[i]) : nullptr;
            }
            if (cur == nullptr) return "unresolved reference '" + join_dotted(path) + "'";
            RefResult out;
            out.u = cur->as<UIntV>();
            return out;
        }
        if (kind == RefKind::Param) {
            auto it = f.params.find(path[0]);
            if (it == f.params.end()) return "unbound parameter '" + path[0] + "'";
            if (path.size() > 1) return "parameter '" + path[0] + "' has no fields";
            RefResult out;
            out.is_param = true;
            out.param_value = Int128(it->second);
            return out;
        }
        const ParseValue* v = find_path(f, path);
        if (v == nullptr) return "unresolved reference '" + join_dotted(path) + "'";
        RefResult out;
        out.u = v->as<UIntV>();
        return out;
    }

    Expected<const ParseValue*, std::string> resolve_value(const std::vector<std::string>& path,
                                                           RefKind kind, const Frame& f,
                                                           const Binding* b) const {
        if (b != nullptr && path[0] == *b->name) {
            const ParseValue* cur = b->value;
            for (size_t i = 1; i < path.size() && cur != nullptr; ++i) {
                const auto* r = cur->as<RecordV>();
                cur = r != nullptr ? r->find(path[i]) : nullptr;
            }
            if (cur == nullptr) return "unresolved reference '" + join_dotted(path) + "'";
            return cur;
        }
        if (kind == RefKind::Param) return "parameter '" + path[0] + "' is not a value";
        const ParseValue* v = find_path(f, path);
        if (v == nullptr) return "unresolved reference '" + join_dotted(path) + "'";
        return v;
    }

    // --- instruction loop ----------------------------------------------------

    Result run_body(const InstrList& body, Frame& f, ViewT view) {
        struct Win {
            ViewT outer;
            int64_t bits;
        };
        std::vector<Win> wins;
        bool reading = f.op->op == OpKind::FromView;

        for (const auto& in : body) {
            if (++stats_.instructions > opts_.fuel)
                return vio(FailKind::Overflow, f, "", view, "execution budget exhausted", true);

            if (const auto* g = in.as<GuardConst>()) {
                ++stats_.guard_checks;
                if (view.available_bits() < g->bits)
                    return vio(FailKind::Overflow, f, "", view, need_msg(g->bits, view));
                continue;
            }
            if (const auto* g = in.as<GuardExpr>()) {
                ++stats_.guard_checks;
                auto n = eval(g->bits_expr, f, nullptr);
                if (!n.ok()) return vio(FailKind::Underflow, f, "", view, n.error());
                if (n.value() < 0)
                    return vio(FailKind::Underflow, f, "", view, "negative window requirement");
                if (Int128(view.available_bits()) < n.value())
                    return vio(FailKind::Overflow, f, "", view,
                               need_msg(static_cast<int64_t>(n.value()), view));
                continue;
            }
            if (const auto* r = in.as<ReadInstr>()) {
                auto got = view.get(r->width_bits, r->order);
                if (!got.ok())
                    return vio(fail_kind_of(got.error()), f, strip_marker(r->slot), view,
                               need_msg(r->width_bits, view), true);
                ParseValue* slot = ensure_path(f, split_dotted(r->slot));
                if (slot == nullptr)
                    return vio(FailKind::Semantic, f, strip_marker(r->slot), view,
                               "unreachable slot", true);
                *slot = make_uint(got.value().value, r->width_bits);
                view = got.value().rest;
                continue;
            }
            if (const auto* w = in.as<WriteInstr>()) {
                auto res = do_write(*w, f, view);
                if (!res.ok()) return res.error();
                view = res.value();
                continue;
            }
            if (const auto* ev = in.as<EvalInstr>()) {
                auto v = eval(ev->expr, f, nullptr);
                if (!v.ok())
                    return vio(FailKind::Semantic, f, strip_marker(ev->slot), view, v.error());
                ParseValue* slot = ensure_path(f, split_dotted(ev->slot));
                if (slot == nullptr)
                    return vio(FailKind::Semantic, f, strip_marker(ev->slot), view,
                               "unreachable slot", true);
                *slot = make_uint(static_cast<uint64_t>(v.value()), 64);
                continue;
            }
            if (const auto* s = in.as<SemCheckInstr>()) {
                auto v = eval(s->expr, f, nullptr);
                if (!v.ok())
                    return vio(FailKind::Semantic, f, strip_marker(s->field_path), view, v.error());
                if (v.value() == 0)
                    return vio(FailKind::Semantic, f, strip_marker(s->field_path), view,
                               "guard " + to_string(s->expr) + " failed");
                continue;
            }
            if (const auto* sel = in.as<SelectArmInstr>()) {
                auto res = do_select(*sel, f, view);
                if (res.has_value()) return *res;
                continue;
            }
            if (const auto* c = in.as<ConstrainInstr>()) {
                auto n = eval(c->bytes_expr, f, nullptr);
                if (!n.ok()) return vio(FailKind::Underflow, f, "", view, n.error());
                Int128 nb = n.value();
                if (nb < 0)
                    return vio(FailKind::Underflow, f, "", view,
                               "window constraint is negative (" + int128_to_string(nb) +
                                   " bytes)");
                if (nb > Int128(view.available_bits() / 8))
                    return vio(FailKind::Underflow, f, "", view,
                               "window constraint of " + int128_to_string(nb) +
                                   " bytes exceeds the window");
                int64_t bits = static_cast<int64_t>(nb) * 8;
                auto narrowed = view.constrain(bits);
                assert(narrowed.ok());
                wins.push_back(Win{view, bits});
                view = narrowed.value();
                continue;
            }
            if (in.is<EndConstrainInstr>()) {
                assert(!wins.empty());
                if constexpr (std::is_same_v<ViewT, MutableView>) {
                    int64_t slack = view.available_bits();
                    if (slack > 0) view = view.fill_zero(slack).value();
                }
                ViewT outer = wins.back().outer;
                int64_t bits = wins.back().bits;
                wins.pop_back();
                view = outer.advance(bits).value();
                continue;
            }
            if (const auto* call = in.as<CallInstr>()) {
                auto res = do_call(*call, f, view);
                if (!res.ok()) return res.error();
                view = res.value();
                continue;
            }
            if (const auto* lp = in.as<LoopInstr>()) {
                auto res = reading ? loop_read(*lp, f, view) : loop_write(*lp, f, view);
                if (!res.ok()) return res.error();
                view = res.value();
                continue;
            }
            if (const auto* rp = in.as<RepeatInstr>()) {
                auto res = reading ? repeat_read(*rp, f, view) : repeat_write(*rp, f, view);
                if (!res.ok()) return res.error();
                view = res.value();
                continue;
            }
            if (const auto* d = in.as<DispatchInstr>()) {
                auto res = dispatch(*d, f, view);
                if (!res.ok()) return res.error();
                view = res.value();
                continue;
            }
            if (const auto* fail = in.as<FailInstr>())
                return vio(fail->kind, f, "", view, fail->detail);
            if (in.is<SucceedInstr>()) {
                assert(wins.empty());
                return view;
            }
            // Size descriptors have no stream effect.
        }
        return view;
    }

    Result do_write(const WriteInstr& w, Frame& f, ViewT view) {
        if constexpr (std::is_same_v<ViewT, MutableView>) {
            const ParseValue* pv = find_path(f, split_dotted(w.slot));
            const UIntV* u = pv != nullptr ? pv->as<UIntV>() : nullptr;
            if (u == nullptr)
                return vio(FailKind::Semantic, f, strip_marker(w.slot), view,
                           "value is missing an integer here");
            if (u->width_bits != w.width_bits)
                return vio(FailKind::Semantic, f, strip_marker(w.slot), view,
                           "value width " + std::to_string(u->width_bits) + " does not match field width " +
                               std::to_string(w.width_bits));
            auto put = view.put(u->value, w.width_bits, w.order);
            if (!put.ok()) {
                if (put.error() == ViewError::Domain)
                    return vio(FailKind::Semantic, f, strip_marker(w.slot), view,
                               "value does not fit the field");
                return vio(fail_kind_of(put.error()), f, strip_marker(w.slot), view,
                           need_msg(w.width_bits, view), true);
            }
            return put.value();
        } else {
            return vio(FailKind::Semantic, f, strip_marker(w.slot), view,
                       "write on a read-only view", true);
        }
    }

    std::optional<Violation> do_select(const SelectArmInstr& sel, Frame& f, const ViewT& view) {
        const TypeDef* vdef = typed_.find_type(sel.variant_type);
        assert(vdef != nullptr);
        std::map<std::string, uint64_t> params;
        for (size_t i = 0; i < sel.args.size() && i < vdef->params.size(); ++i) {
            auto v = eval(sel.args[i], f, nullptr);
            if (!v.ok())
                return vio(FailKind::InvalidVariant, f, strip_marker(sel.tag_slot), view,
                           v.error());
            auto fit = fit_param(v.value(), vdef->params[i]);
            if (!fit.ok())
                return vio(FailKind::InvalidVariant, f, strip_marker(sel.tag_slot), view,
                           fit.error());
            params[vdef->params[i].name] = fit.value();
        }
        auto tag = pick_arm(*vdef, params);
        if (!tag.ok())
            return vio(FailKind::InvalidVariant, f, strip_marker(sel.tag_slot), view, tag.error());
        f.sel_tags[sel.tag_slot] = tag.value();
        return std::nullopt;
    }

    Expected<uint64_t, std::string> fit_param(Int128 v, const ParamDecl& p) const {
        if (v < 0 || (p.width_bits < 64 && v >= (Int128(1) << p.width_bits)) ||
            v > Int128(UINT64_MAX))
            return "argument " + int128_to_string(v) + " does not fit parameter '" + p.name + "'";
        return static_cast<uint64_t>(v);
    }

    Result do_call(const CallInstr& call, Frame& f, ViewT view) {
        const OperationIR* callee = mod_.find(call.type_name, call.op, call.unguarded);
        const TypeDef* cdef = typed_.find_type(call.type_name);
        if (callee == nullptr || cdef == nullptr)
            return vio(FailKind::Semantic, f, strip_marker(call.dest_slot), view,
                       "missing operation " + op_label(call.type_name, call.op, call.unguarded),
                       true);

        Frame cf;
        cf.def = cdef;
        for (size_t i = 0; i < call.args.size() && i < cdef->params.size(); ++i) {
            auto v = eval(call.args[i], f, nullptr);
            if (!v.ok())
                return vio(FailKind::Semantic, f, strip_marker(call.dest_slot), view, v.error());
            auto fit = fit_param(v.value(), cdef->params[i]);
            if (!fit.ok())
                return vio(FailKind::Semantic, f, strip_marker(call.dest_slot), view, fit.error());
            cf.params[cdef->params[i].name] = fit.value();
        }
        if (!call.tag_slot.empty()) {
            auto it = f.sel_tags.find(call.tag_slot);
            if (it == f.sel_tags.end())
                return vio(FailKind::InvalidVariant, f, strip_marker(call.dest_slot), view,
                           "variant arm not selected", true);
            cf.bound_tag = it->second;
        }

        ParseValue detached;
        if (call.op == OpKind::FromView) {
            detached.type_name = call.type_name;
            cf.root = &detached;
        } else {
            const ParseValue* target = find_path(f, split_dotted(call.dest_slot));
            if (target == nullptr)
                return vio(FailKind::Semantic, f, strip_marker(call.dest_slot), view,
                           "value is missing a component here");
            // The write path never stores into slots, so the tree stays intact.
            cf.root = const_cast<ParseValue*>(target);
        }

        auto r = run_op(*callee, cf, view, false);
        if (!r.ok()) {
            Violation v = r.error();
            v.path = join_path(strip_marker(call.dest_slot), v.path);
            return v;
        }
        if (call.op == OpKind::FromView) {
            ParseValue* slot = ensure_path(f, split_dotted(call.dest_slot));
            if (slot == nullptr)
                return vio(FailKind::Semantic, f, strip_marker(call.dest_slot), view,
                           "unreachable slot", true);
            *slot = std::move(detached);
        }
        return r.value();
    }

    Result loop_read(const LoopInstr& lp, Frame& f, ViewT view) {
        ParseValue* cont = ensure_path(f, split_dotted(lp.dest_slot));
        if (cont == nullptr)
            return vio(FailKind::Semantic, f, strip_marker(lp.dest_slot), view, "unreachable slot",
                       true);
        cont->node = VectorV{};
        size_t idx = 0;
        while (view.available_bits() > 0) {
            ViewT at_start = view;
            f.owned.emplace_back();
            f.elems.push_back(&f.owned.back());
            auto r = run_body(lp.body, f, view);
            ParseValue elem = std::move(f.owned.back());
            f.elems.pop_back();
            f.owned.pop_back();
            if (!r.ok()) {
                if (opts_.strict_vectors) {
                    Violation v = r.error();
                    v.path = join_path(strip_marker(lp.dest_slot) + "[" + std::to_string(idx) + "]",
                                       v.path);
                    return v;
                }
                view = at_start;  // keep the complete prefix
                break;
            }
            if (r.value().head_bits() == at_start.head_bits())
                return vio(FailKind::Overflow, f, strip_marker(lp.dest_slot), view,
                           "element consumed no bits", true);
            view = r.value();
            cont->as<VectorV>()->elems.push_back(std::move(elem));
            ++idx;
        }
        return view;
    }

    Result loop_write(const LoopInstr& lp, Frame& f, ViewT view) {
        const ParseValue* cv = find_path(f, split_dotted(lp.dest_slot));
        const VectorV* vec = cv != nullptr ? cv->as<VectorV>() : nullptr;
        if (vec == nullptr)
            return vio(FailKind::Semantic, f, strip_marker(lp.dest_slot), view,
                       "value is missing a sequence here");
        for (size_t idx = 0; idx < vec->elems.size(); ++idx) {
            f.elems.push_back(const_cast<ParseValue*>(&vec->elems[idx]));
            auto r = run_body(lp.body, f, view);
            f.elems.pop_back();
            if (!r.ok()) {
                Violation v = r.error();
                v.path =
                    join_path(strip_marker(lp.dest_slot) + "[" + std::to_string(idx) + "]", v.path);
                return v;
            }
            view = r.value();
        }
        return view;
    }

    Expected<int64_t, Violation> repeat_count(const RepeatInstr& rp, Frame& f, const ViewT& view) {
        auto n = eval(rp.count, f, nullptr);
        if (!n.ok()) return vio(FailKind::Underflow, f, strip_marker(rp.dest_slot), view, n.error());
        if (n.value() < 0)
            return vio(FailKind::Underflow, f, strip_marker(rp.dest_slot), view,
                       "negative element count");
        if (n.value() > Int128(1) << 40)
            return vio(FailKind::Underflow, f, strip_marker(rp.dest_slot), view,
                       "element count too large");
        return static_cast<int64_t>(n.value());
    }

    Result repeat_read(const RepeatInstr& rp, Frame& f, ViewT view) {
        auto count = repeat_count(rp, f, view);
        if (!count.ok()) return count.error();
        ParseValue* cont = ensure_path(f, split_dotted(rp.dest_slot));
        if (cont == nullptr)
            return vio(FailKind::Semantic, f, strip_marker(rp.dest_slot), view, "unreachable slot",
                       true);
        cont->node = ArrayV{};
        for (int64_t idx = 0; idx < count.value(); ++idx) {
            f.owned.emplace_back();
            f.elems.push_back(&f.owned.back());
            auto r = run_body(rp.body, f, view);
            ParseValue elem = std::move(f.owned.back());
            f.elems.pop_back();
            f.owned.pop_back();
            if (!r.ok()) {
                Violation v = r.error();
                v.path =
                    join_path(strip_marker(rp.dest_slot) + "[" + std::to_string(idx) + "]", v.path);
                return v;
            }
            view = r.value();
            cont->as<ArrayV>()->elems.push_back(std::move(elem));
        }
        return view;
    }

    Result repeat_write(const RepeatInstr& rp, Frame& f, ViewT view) {
        auto count = repeat_count(rp, f, view);
        if (!count.ok()) return count.error();
        const ParseValue* cv = find_path(f, split_dotted(rp.dest_slot));
        const ArrayV* arr = cv != nullptr ? cv->as<ArrayV>() : nullptr;
        if (arr == nullptr)
            return vio(FailKind::Semantic, f, strip_marker(rp.dest_slot), view,
                       "value is missing a sequence here");
        if (static_cast<int64_t>(arr->elems.size()) != count.value())
            return vio(FailKind::Semantic, f, strip_marker(rp.dest_slot), view,
                       "element count mismatch: value has " + std::to_string(arr->elems.size()) +
                           ", type expects " + std::to_string(count.value()));
        for (size_t idx = 0; idx < arr->elems.size(); ++idx) {
            f.elems.push_back(const_cast<ParseValue*>(&arr->elems[idx]));
            auto r = run_body(rp.body, f, view);
            f.elems.pop_back();
            if (!r.ok()) {
                Violation v = r.error();
                v.path =
                    join_path(strip_marker(rp.dest_slot) + "[" + std::to_string(idx) + "]", v.path);
                return v;
            }
            view = r.value();
        }
        return view;
    }

    Result dispatch(const DispatchInstr& d, Frame& f, ViewT view) {
        if (!f.bound_tag.has_value())
            return vio(FailKind::InvalidVariant, f, "", view, "variant arm not selected", true);
        int tag = *f.bound_tag;
        const auto* vt = std::get_if<VariantType>(&f.def->body.node);
        if (vt == nullptr || tag < 0 || tag >= static_cast<int>(vt->arms.size()) ||
            static_cast<size_t>(tag) >= d.arms.size())
            return vio(FailKind::InvalidVariant, f, "", view, "selected arm is out of range",
                       true);
        if (f.op->op == OpKind::FromView) {
            VariantV x;
            x.arm_name = vt->arms[static_cast<size_t>(tag)].name;
            x.arm_index = tag;
            f.root->node = std::move(x);
        } else {
            const ParseValue* rootp = f.root;
            const auto* x = rootp->as<VariantV>();
            if (x == nullptr)
                return vio(FailKind::Semantic, f, "", view, "value is missing a variant here");
            if (x->arm_name != vt->arms[static_cast<size_t>(tag)].name)
                return vio(FailKind::Semantic, f, "", view,
                           "selected arm '" + vt->arms[static_cast<size_t>(tag)].name +
                               "' does not match value arm '" + x->arm_name + "'");
            if (x->inner.empty())
                return vio(FailKind::Semantic, f, "", view, "variant value has no inner value");
        }
        return run_body(d.arms[static_cast<size_t>(tag)], f, view);
    }
};

/// Positional argument binding shared by the public entry points.
Expected<std::map<std::string, uint64_t>, Violation> bind_args(const TypeDef& def,
                                                               const std::vector<uint64_t>& args) {
    if (args.size() != def.params.size()) {
        Violation v;
        v.kind = FailKind::Semantic;
        v.type_name = def.name;
        v.detail = "expected " + std::to_string(def.params.size()) + " argument(s), got " +
                   std::to_string(args.size());
        return v;
    }
    std::map<std::string, uint64_t> params;
    for (size_t i = 0; i < args.size(); ++i) {
        const ParamDecl& p = def.params[i];
        if (p.width_bits < 64 && args[i] >= (uint64_t(1) << p.width_bits)) {
            Violation v;
            v.kind = FailKind::Semantic;
            v.type_name = def.name;
            v.detail = "argument " + std::to_string(args[i]) + " does not fit parameter '" +
                       p.name + "'";
            return v;
        }
        params[p.name] = args[i];
    }
    return params;
}

}  // namespace

ParseOutcome Engine::from_view(const std::string& type, View view,
                               const std::vector<uint64_t>& args) const {
    ParseOutcome out;
    const TypeDef* def = typed_.find_type(type);
    const OperationIR* op = mod_.find(type, OpKind::FromView, false);
    if (def == nullptr || op == nullptr) {
        out.violation = Violation{FailKind::Semantic, type, "", 0, "unknown type '" + type + "'",
                                  false};
        return out;
    }
    auto params = bind_args(*def, args);
    if (!params.ok()) {
        out.violation = params.error();
        return out;
    }

    Exec<View> ex(typed_, mod_, opts_, out.stats);
    typename Exec<View>::Frame f;
    f.def = def;
    f.params = std::move(params).value();
    ParseValue root;
    root.type_name = type;
    f.root = &root;

    if (std::holds_alternative<VariantType>(def->body.node)) {
        auto tag = ex.pick_arm(*def, f.params);
        if (!tag.ok()) {
            out.violation =
                Violation{FailKind::InvalidVariant, type, "", view.head_bits(), tag.error(), false};
            return out;
        }
        f.bound_tag = tag.value();
    }

    int64_t start = view.head_bits();
    auto r = ex.run_op(*op, f, view, true);
    if (!r.ok()) {
        out.violation = r.error();
        return out;
    }
    out.consumed_bits = r.value().head_bits() - start;
    root.type_name = type;
    out.value = std::move(root);
    return out;
}

WriteOutcome Engine::to_view(const std::string& type, MutableView view, const ParseValue& value,
                             const std::vector<uint64_t>& args) const {
    WriteOutcome out;
    const TypeDef* def = typed_.find_type(type);
    const OperationIR* op = mod_.find(type, OpKind::ToView, false);
    if (def == nullptr || op == nullptr) {
        out.violation = Violation{FailKind::Semantic, type, "", 0, "unknown type '" + type + "'",
                                  false};
        return out;
    }
    auto params = bind_args(*def, args);
    if (!params.ok()) {
        out.violation = params.error();
        return out;
    }

    Exec<MutableView> ex(typed_, mod_, opts_, out.stats);
    typename Exec<MutableView>::Frame f;
    f.def = def;
    f.params = std::move(params).value();
    // The write path only reads the value tree.
    f.root = const_cast<ParseValue*>(&value);

    if (std::holds_alternative<VariantType>(def->body.node)) {
        auto tag = ex.pick_arm(*def, f.params);
        if (!tag.ok()) {
            out.violation =
                Violation{FailKind::InvalidVariant, type, "", view.head_bits(), tag.error(), false};
            return out;
        }
        f.bound_tag = tag.value();
    }

    int64_t start = view.head_bits();
    auto r = ex.run_op(*op, f, view, true);
    if (!r.ok()) {
        out.violation = r.error();
        return out;
    }
    out.written_bits = r.value().head_bits() - start;
    return out;
}

Expected<Buffer, Violation> Engine::to_buffer(const std::string& type, const ParseValue& value,
                                              const std::vector<uint64_t>& args) const {
    auto n = bytes(type, value);
    if (!n.ok()) return n.error();
    MutableBuffer buf(static_cast<size_t>(n.value()));
    auto w = to_view(type, MutableView(buf), value, args);
    if (!w.ok()) return *w.violation;
    return buf.freeze();
}

namespace {

/// Serialized size of a value, walked over its type shape. A constrained
/// field occupies its full window: the write path zero-fills slack, so the
/// window amount is what reaches the wire regardless of the content size.
class Sizer {
public:
    explicit Sizer(const TypedModule& typed) : typed_(typed) {}

    Expected<int64_t, std::string> size_bits(const TypeExpr& t, const ParseValue& v) {
        if (auto* u = std::get_if<UIntType>(&t.node)) {
            if (!v.is<UIntV>()) return std::string("value is not an integer");
            return static_cast<int64_t>(u->width_bits);
        }
        if (auto* n = std::get_if<NamedRef>(&t.node)) {
            const TypeDef* td = typed_.find_type(n->name);
            if (td == nullptr) return "unknown type '" + n->name + "'";
            return size_bits(td->body, v);
        }
        if (auto* a = std::get_if<ArrayType>(&t.node)) return seq_bits(a->elem[0], v);
        if (auto* w = std::get_if<VectorType>(&t.node)) return seq_bits(w->elem[0], v);
        if (auto* r = std::get_if<RecordType>(&t.node)) return record_bits(*r, v);
        if (std::get_if<VariantType>(&t.node) != nullptr) {
            const VariantV* var = v.as<VariantV>();
            if (var == nullptr || var->inner.empty())
                return std::string("variant arm not selected");
            const TypeDef* arm = typed_.find_type(var->arm_name);
            if (arm == nullptr) return "unknown arm '" + var->arm_name + "'";
            return size_bits(arm->body, var->inner[0]);
        }
        return std::string("unsupported type shape");
    }

private:
    Expected<int64_t, std::string> seq_bits(const TypeExpr& elem, const ParseValue& v) {
        const std::vector<ParseValue>* elems = nullptr;
        if (const ArrayV* a = v.as<ArrayV>()) elems = &a->elems;
        if (const VectorV* w = v.as<VectorV>()) elems = &w->elems;
        if (elems == nullptr) return std::string("value is missing a sequence here");
        int64_t total = 0;
        for (const auto& e : *elems) {
            auto r = size_bits(elem, e);
            if (!r.ok()) return r;
            total += r.value();
        }
        return total;
    }

    Expected<int64_t, std::string> record_bits(const RecordType& rec, const ParseValue& v) {
        const RecordV* rv = v.as<RecordV>();
        if (rv == nullptr) return std::string("value is missing a record here");
        int64_t total = 0;
        for (const auto& f : rec.fields) {
            const ParseValue* fv = rv->find(f.name);
            if (fv == nullptr) return "value is missing field '" + f.name + "'";
            auto content = size_bits(f.type, *fv);
            if (!content.ok()) return content;
            if (f.constraint.has_value()) {
                auto window = eval_int(*f.constraint, *rv);
                if (!window.ok()) return window.error();
                if (window.value() < 0)
                    return "window constraint is negative (" +
                           int128_to_string(window.value()) + " bytes)";
                Int128 wbits = window.value() * 8;
                if (content.value() > wbits)
                    return std::string("value exceeds its window constraint");
                total += static_cast<int64_t>(wbits);
            } else {
                total += content.value();
            }
        }
        return total;
    }

    /// Window amounts are integer expressions over earlier sibling fields.
    /// bytes() measures the raw value, matching the runtime evaluator.
    Expected<Int128, std::string> eval_int(const Expr& e, const RecordV& scope) {
        if (auto* i = std::get_if<IntLit>(&e.node)) return i->value;
        if (auto* f = std::get_if<FieldRef>(&e.node)) {
            if (f->kind == RefKind::Param)
                return std::string("size depends on a type parameter");
            auto* v = lookup(scope, f->path);
            if (v == nullptr || !v->is<UIntV>())
                return "cannot resolve '" + join(f->path) + "' in the value";
            return Int128(v->as<UIntV>()->value);
        }
        if (auto* b = std::get_if<BytesOf>(&e.node)) {
            auto* v = lookup(scope, b->path);
            if (v == nullptr) return "cannot resolve '" + join(b->path) + "' in the value";
            int64_t bits = value_bits(*v);
            if (bits % 8 != 0)
                return "size of '" + join(b->path) + "' is not a whole number of bytes";
            return Int128(bits / 8);
        }
        if (auto* u = std::get_if<Unary>(&e.node)) {
            auto s = eval_int(u->sub[0], scope);
            if (!s.ok() || u->op != UnOp::Neg) return s;
            return -s.value();
        }
        if (auto* b = std::get_if<Binary>(&e.node)) {
            auto lhs = eval_int(b->sub[0], scope);
            if (!lhs.ok()) return lhs;
            auto rhs = eval_int(b->sub[1], scope);
            if (!rhs.ok()) return rhs;
            switch (b->op) {
                case BinOp::Add: return lhs.value() + rhs.value();
                case BinOp::Sub: return lhs.value() - rhs.value();
                case BinOp::Mul: return lhs.value() * rhs.value();
                case BinOp::Div:
                    if (rhs.value() == 0) return std::string("division by zero");
                    return lhs.value() / rhs.value();
                default: break;
            }
        }
        return std::string("window amount is not an integer expression");
    }

    static const ParseValue* lookup(const RecordV& scope, const std::vector<std::string>& path) {
        const ParseValue* cur = nullptr;
        const RecordV* rec = &scope;
        for (size_t i = 0; i < path.size(); ++i) {
            if (rec == nullptr) return nullptr;
            cur = rec->find(path[i]);
            if (cur == nullptr) return nullptr;
            rec = cur->as<RecordV>();
        }
        return cur;
    }

    static std::string join(const std::vector<std::string>& path) {
        std::string out;
        for (const auto& p : path) {
            if (!out.empty()) out += '.';
            out += p;
        }
        return out;
    }

    const TypedModule& typed_;
};

}  // namespace

Expected<int64_t, Violation> Engine::bytes(const std::string& type, const ParseValue& value) const {
    auto fail = [&](const std::string& detail) {
        Violation v;
        v.kind = FailKind::Semantic;
        v.type_name = type;
        v.detail = detail;
        return v;
    };
    const TypeDef* def = typed_.find_type(type);
    if (def == nullptr) return fail("unknown type '" + type + "'");
    Sizer sizer(typed_);
    auto bits = sizer.size_bits(def->body, value);
    if (!bits.ok()) return fail(bits.error());
    if (bits.value() % 8 != 0)
        return fail("value size " + std::to_string(bits.value()) +
                    " bits is not a whole number of bytes");
    return bits.value() / 8;
}

Expected<bool, Violation> Engine::equal(const std::string& type, const ParseValue& a,
                                        const ParseValue& b) const {
    if (!a.type_name.empty() && !b.type_name.empty() && a.type_name != b.type_name) {
        Violation v;
        v.kind = FailKind::Semantic;
        v.type_name = type;
        v.detail = "type mismatch: '" + a.type_name + "' vs '" + b.type_name + "'";
        return v;
    }
    return equal_values(a, b);
}

Expected<bool, Violation> Engine::not_equal(const std::string& type, const ParseValue& a,
                                            const ParseValue& b) const {
    auto r = equal(type, a, b);
    if (!r.ok()) return r;
    return !r.value();
}

std::string Engine::to_string_value(const ParseValue& value) const { return render(value); }

}  // namespace msgc
