#include "msgc/synthesis.hpp"

#include <cassert>

namespace msgc {

namespace {

Instr mk(auto node) { return Instr{std::move(node)}; }

std::vector<std::string> slot_components(const std::string& slot) {
    if (slot == "@self") return {};
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t dot; (dot = slot.find('.', start)) != std::string::npos; start = dot + 1)
        parts.push_back(slot.substr(start, dot - start));
    parts.push_back(slot.substr(start));
    return parts;
}

// Guards, constraints and selector arguments are written in the scope of
// their record. Once the record is inlined into an enclosing operation its
// fields live under `pre`, so leading field components become absolute slot
// paths. Parameters stay symbolic.
void reroot(Expr& e, const std::vector<std::string>& pre) {
    if (pre.empty()) return;
    if (auto* f = std::get_if<FieldRef>(&e.node)) {
        if (f->kind == RefKind::Field) f->path.insert(f->path.begin(), pre.begin(), pre.end());
    } else if (auto* b = std::get_if<BytesOf>(&e.node)) {
        b->path.insert(b->path.begin(), pre.begin(), pre.end());
    } else if (auto* p = std::get_if<PredCall>(&e.node)) {
        for (auto& a : p->args) reroot(a, pre);
    } else if (auto* u = std::get_if<Unary>(&e.node)) {
        reroot(u->sub[0], pre);
    } else if (auto* bi = std::get_if<Binary>(&e.node)) {
        for (auto& s : bi->sub) reroot(s, pre);
    }
}

Expr rerooted(Expr e, const std::vector<std::string>& pre) {
    reroot(e, pre);
    return e;
}

std::vector<Expr> rerooted(std::vector<Expr> es, const std::vector<std::string>& pre) {
    for (auto& e : es) reroot(e, pre);
    return es;
}

class Synth {
public:
    explicit Synth(const TypedModule& typed) : typed_(typed) {}

    ModuleIR run() {
        ModuleIR mod;
        for (const auto& name : typed_.order) {
            const TypeDef* def = typed_.find_type(name);
            mod.ops.push_back(bytes_op(*def));
            mod.ops.push_back(stream_op(*def, OpKind::FromView));
            mod.ops.push_back(stream_op(*def, OpKind::ToView));
            mod.ops.push_back(value_op(*def, OpKind::Equal));
            mod.ops.push_back(value_op(*def, OpKind::ToString));
        }
        return mod;
    }

private:
    const TypedModule& typed_;

    bool is_variant_def(const std::string& name) const {
        const TypeDef* def = typed_.find_type(name);
        return def != nullptr && std::holds_alternative<VariantType>(def->body.node);
    }

    // ------------------------------------------------------------------
    // bytes
    // ------------------------------------------------------------------

    OperationIR bytes_op(const TypeDef& def) {
        OperationIR op;
        op.type_name = def.name;
        op.op = OpKind::Bytes;
        auto size = typed_.find_info(def.name)->const_size_bits;
        if (size && *size % 8 == 0) op.constant_bytes = *size / 8;
        bytes_body(def.body, "", op.body);
        op.body.push_back(mk(SucceedInstr{}));
        return op;
    }

    void bytes_body(const TypeExpr& t, const std::string& prefix, InstrList& out) {
        if (auto* u = std::get_if<UIntType>(&t.node)) {
            out.push_back(mk(AddBytesConst{u->width_bits}));
            return;
        }
        if (std::holds_alternative<ArrayType>(t.node) || std::holds_alternative<VectorType>(t.node)) {
            auto size = const_size_bits_of(typed_, t);
            if (size)
                out.push_back(mk(AddBytesConst{*size}));
            else
                out.push_back(mk(AddBytesElems{}));
            return;
        }
        if (auto* r = std::get_if<RecordType>(&t.node)) {
            for (const auto& f : r->fields)
                out.push_back(mk(AddBytesField{prefix.empty() ? f.name : prefix + "." + f.name}));
            return;
        }
        if (std::holds_alternative<VariantType>(t.node)) {
            out.push_back(mk(AddBytesArm{}));
            return;
        }
        if (std::holds_alternative<NamedRef>(t.node)) {
            out.push_back(mk(AddBytesField{prefix.empty() ? "@self" : prefix}));
            return;
        }
    }

    // ------------------------------------------------------------------
    // from_view / to_view
    // ------------------------------------------------------------------

    OperationIR stream_op(const TypeDef& def, OpKind kind) {
        OperationIR op;
        op.type_name = def.name;
        op.op = kind;
        if (auto* va = std::get_if<VariantType>(&def.body.node)) {
            DispatchInstr d;
            d.variant_type = def.name;
            for (const auto& arm : va->arms) {
                InstrList body;
                body.push_back(mk(CallInstr{arm.name, kind, {}, "@inner", "", false}));
                d.arms.push_back(std::move(body));
            }
            op.body.push_back(mk(std::move(d)));
        } else {
            stream_type(def.body, "@self", kind, op.body);
        }
        op.body.push_back(mk(SucceedInstr{}));
        return op;
    }

    // Emit the instructions that move one value of type `t` between the
    // current window and the slot `dest`.
    void stream_type(const TypeExpr& t, const std::string& dest, OpKind kind, InstrList& out) {
        if (auto* u = std::get_if<UIntType>(&t.node)) {
            out.push_back(mk(GuardConst{u->width_bits}));
            if (kind == OpKind::FromView)
                out.push_back(mk(ReadInstr{dest, u->width_bits, u->order}));
            else
                out.push_back(mk(WriteInstr{dest, u->width_bits, u->order}));
            return;
        }
        if (auto* a = std::get_if<ArrayType>(&t.node)) {
            const TypeExpr& elem = a->elem[0];
            RepeatInstr rep;
            rep.dest_slot = dest;
            rep.count = a->count;
            if (auto* eu = std::get_if<UIntType>(&elem.node)) {
                // One guard covers the whole array; counts always fold.
                auto k = const_fold(typed_, {}, a->count);
                assert(k.has_value());
                out.push_back(mk(GuardConst{static_cast<int64_t>(*k) * eu->width_bits}));
                if (kind == OpKind::FromView)
                    rep.body.push_back(mk(ReadInstr{"@elem", eu->width_bits, eu->order}));
                else
                    rep.body.push_back(mk(WriteInstr{"@elem", eu->width_bits, eu->order}));
            } else {
                stream_type(elem, "@elem", kind, rep.body);
            }
            out.push_back(mk(std::move(rep)));
            return;
        }
        if (auto* v = std::get_if<VectorType>(&t.node)) {
            LoopInstr loop;
            loop.dest_slot = dest;
            stream_type(v->elem[0], "@elem", kind, loop.body);
            out.push_back(mk(std::move(loop)));
            return;
        }
        if (auto* r = std::get_if<RecordType>(&t.node)) {
            std::string prefix = dest == "@self" ? "" : dest + ".";
            std::vector<std::string> pre = slot_components(dest);
            for (const auto& f : r->fields) {
                std::string slot = prefix + f.name;
                // Arm selection depends only on earlier values, so it runs
                // before the field's window is narrowed.
                if (auto* n = std::get_if<NamedRef>(&f.type.node); n && is_variant_def(n->name)) {
                    out.push_back(mk(SelectArmInstr{n->name, rerooted(n->args, pre), slot}));
                    if (f.constraint)
                        out.push_back(mk(ConstrainInstr{slot, rerooted(*f.constraint, pre)}));
                    out.push_back(
                        mk(CallInstr{n->name, kind, rerooted(n->args, pre), slot, slot, false}));
                } else {
                    if (f.constraint)
                        out.push_back(mk(ConstrainInstr{rerooted(*f.constraint, pre)}));
                    stream_type(f.type, slot, kind, out);
                }
                if (f.guard) out.push_back(mk(SemCheckInstr{rerooted(*f.guard, pre), slot}));
                if (f.constraint) out.push_back(mk(EndConstrainInstr{}));
            }
            return;
        }
        if (std::holds_alternative<VariantType>(t.node)) {
            // Typecheck limits variants to definition bodies.
            assert(false && "variant inside a type expression");
            return;
        }
        if (auto* n = std::get_if<NamedRef>(&t.node)) {
            if (is_variant_def(n->name)) {
                out.push_back(mk(SelectArmInstr{n->name, n->args, dest}));
                out.push_back(mk(CallInstr{n->name, kind, n->args, dest, dest, false}));
            } else {
                out.push_back(mk(CallInstr{n->name, kind, n->args, dest, "", false}));
            }
            return;
        }
    }

    // ------------------------------------------------------------------
    // equal / to_string
    // ------------------------------------------------------------------

    OperationIR value_op(const TypeDef& def, OpKind kind) {
        OperationIR op;
        op.type_name = def.name;
        op.op = kind;
        if (auto* va = std::get_if<VariantType>(&def.body.node)) {
            DispatchInstr d;
            d.variant_type = def.name;
            for (const auto& arm : va->arms) {
                InstrList body;
                body.push_back(mk(CallInstr{arm.name, kind, {}, "@inner", "", false}));
                d.arms.push_back(std::move(body));
            }
            op.body.push_back(mk(std::move(d)));
        } else {
            value_components(def.body, "@self", kind, op.body);
        }
        op.body.push_back(mk(SucceedInstr{}));
        return op;
    }

    // List the named definitions the operation recurses into, in field order.
    void value_components(const TypeExpr& t, const std::string& dest, OpKind kind, InstrList& out) {
        if (auto* a = std::get_if<ArrayType>(&t.node)) {
            value_components(a->elem[0], dest + "[]", kind, out);
            return;
        }
        if (auto* v = std::get_if<VectorType>(&t.node)) {
            value_components(v->elem[0], dest + "[]", kind, out);
            return;
        }
        if (auto* r = std::get_if<RecordType>(&t.node)) {
            std::string prefix = dest == "@self" ? "" : dest + ".";
            for (const auto& f : r->fields) value_components(f.type, prefix + f.name, kind, out);
            return;
        }
        if (auto* n = std::get_if<NamedRef>(&t.node)) {
            out.push_back(mk(CallInstr{n->name, kind, n->args, dest, "", false}));
            return;
        }
    }
};

}  // namespace

ModuleIR synthesize(const TypedModule& typed) { return Synth(typed).run(); }

}  // namespace msgc
