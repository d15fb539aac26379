#include "msgc/ir.hpp"

#include <sstream>

namespace msgc {

const char* to_string(OpKind k) {
    switch (k) {
        case OpKind::Bytes: return "bytes";
        case OpKind::FromView: return "from_view";
        case OpKind::ToView: return "to_view";
        case OpKind::Equal: return "equal";
        case OpKind::ToString: return "to_string";
    }
    return "?";
}

const char* to_string(FailKind k) {
    switch (k) {
        case FailKind::Overflow: return "overflow";
        case FailKind::Underflow: return "underflow";
        case FailKind::InvalidVariant: return "invalid_variant";
        case FailKind::Semantic: return "semantic";
    }
    return "?";
}

bool LoopInstr::operator==(const LoopInstr& o) const {
    return dest_slot == o.dest_slot && body == o.body;
}

bool RepeatInstr::operator==(const RepeatInstr& o) const {
    return dest_slot == o.dest_slot && count == o.count && body == o.body;
}

bool DispatchInstr::operator==(const DispatchInstr& o) const {
    return variant_type == o.variant_type && arms == o.arms;
}

std::string op_label(const std::string& type_name, OpKind op, bool unguarded) {
    std::string s = type_name;
    s += '.';
    s += to_string(op);
    if (unguarded) s += "!";
    return s;
}

std::string op_label(const OperationIR& op) {
    return op_label(op.type_name, op.op, op.unguarded);
}

const OperationIR* ModuleIR::find(const std::string& type_name, OpKind op, bool unguarded) const {
    for (const auto& o : ops) {
        if (o.type_name == type_name && o.op == op && o.unguarded == unguarded) return &o;
    }
    return nullptr;
}

OperationIR* ModuleIR::find(const std::string& type_name, OpKind op, bool unguarded) {
    return const_cast<OperationIR*>(static_cast<const ModuleIR*>(this)->find(type_name, op, unguarded));
}

namespace {

void dump_body(std::ostream& os, const InstrList& body, int indent);

void dump_instr(std::ostream& os, const Instr& in, int indent) {
    std::string pad(static_cast<size_t>(indent), ' ');
    os << pad;
    if (auto* g = in.as<GuardConst>()) {
        os << "GUARD " << g->bits;
    } else if (auto* ge = in.as<GuardExpr>()) {
        os << "GUARD (" << to_string(ge->bits_expr) << ")";
    } else if (auto* r = in.as<ReadInstr>()) {
        os << "READ " << r->width_bits << " " << to_string(r->order) << " -> " << r->slot;
    } else if (auto* w = in.as<WriteInstr>()) {
        os << "WRITE " << w->width_bits << " " << to_string(w->order) << " <- " << w->slot;
    } else if (auto* e = in.as<EvalInstr>()) {
        os << "EVAL " << e->slot << " <- " << to_string(e->expr);
    } else if (auto* s = in.as<SemCheckInstr>()) {
        os << "SEMCHECK " << to_string(s->expr) << " @" << s->field_path;
    } else if (auto* sa = in.as<SelectArmInstr>()) {
        os << "SELECTARM " << sa->variant_type << "(";
        for (size_t i = 0; i < sa->args.size(); ++i) {
            if (i) os << ", ";
            os << to_string(sa->args[i]);
        }
        os << ") -> " << sa->tag_slot;
    } else if (auto* c = in.as<ConstrainInstr>()) {
        os << "CONSTRAIN (" << to_string(c->bytes_expr) << ")";
    } else if (in.is<EndConstrainInstr>()) {
        os << "ENDCONSTRAIN";
    } else if (auto* call = in.as<CallInstr>()) {
        os << "CALL " << op_label(call->type_name, call->op, call->unguarded) << "(";
        for (size_t i = 0; i < call->args.size(); ++i) {
            if (i) os << ", ";
            os << to_string(call->args[i]);
        }
        os << ")";
        if (!call->tag_slot.empty()) os << " tag=" << call->tag_slot;
        if (!call->dest_slot.empty()) os << " -> " << call->dest_slot;
    } else if (auto* lp = in.as<LoopInstr>()) {
        os << "LOOP -> " << lp->dest_slot << " {\n";
        dump_body(os, lp->body, indent + 2);
        os << pad << "}";
    } else if (auto* rp = in.as<RepeatInstr>()) {
        os << "REPEAT (" << to_string(rp->count) << ") -> " << rp->dest_slot << " {\n";
        dump_body(os, rp->body, indent + 2);
        os << pad << "}";
    } else if (auto* d = in.as<DispatchInstr>()) {
        os << "DISPATCH " << d->variant_type << " {\n";
        for (size_t i = 0; i < d->arms.size(); ++i) {
            os << pad << "  ARM " << i << ":\n";
            dump_body(os, d->arms[i], indent + 4);
        }
        os << pad << "}";
    } else if (auto* f = in.as<FailInstr>()) {
        os << "FAIL " << to_string(f->kind);
        if (!f->detail.empty()) os << " (" << f->detail << ")";
    } else if (in.is<SucceedInstr>()) {
        os << "SUCCEED";
    } else if (auto* ab = in.as<AddBytesConst>()) {
        if (ab->bits % 8 == 0)
            os << "BYTES += " << (ab->bits / 8);
        else
            os << "BYTES += " << ab->bits << "b";
    } else if (auto* af = in.as<AddBytesField>()) {
        os << "BYTES += field " << af->field;
    } else if (in.is<AddBytesElems>()) {
        os << "BYTES += elems";
    } else if (in.is<AddBytesArm>()) {
        os << "BYTES += arm";
    }
    os << "\n";
}

void dump_body(std::ostream& os, const InstrList& body, int indent) {
    for (const auto& in : body) dump_instr(os, in, indent);
}

}  // namespace

std::string dump(const OperationIR& op) {
    std::ostringstream os;
    os << "op " << op_label(op);
    if (op.unguarded || op.entry_requirement_bits > 0) {
        os << " [entry " << op.entry_requirement_bits << "]";
    }
    if (op.constant_bytes) os << " [const " << *op.constant_bytes << "]";
    os << ":\n";
    dump_body(os, op.body, 2);
    return os.str();
}

std::string dump(const ModuleIR& mod) {
    std::string out;
    for (const auto& op : mod.ops) {
        out += dump(op);
        out += "\n";
    }
    return out;
}

int64_t static_guard_count(const InstrList& body) {
    int64_t n = 0;
    for (const auto& in : body) {
        if (in.is<GuardConst>() || in.is<GuardExpr>()) {
            ++n;
        } else if (auto* lp = in.as<LoopInstr>()) {
            n += static_guard_count(lp->body);
        } else if (auto* rp = in.as<RepeatInstr>()) {
            n += static_guard_count(rp->body);
        } else if (auto* d = in.as<DispatchInstr>()) {
            for (const auto& a : d->arms) n += static_guard_count(a);
        }
    }
    return n;
}

}  // namespace msgc
