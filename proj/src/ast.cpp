#include "msgc/ast.hpp"

#include <sstream>

namespace msgc {

bool PredCall::operator==(const PredCall& o) const { return name == o.name && args == o.args; }
bool Unary::operator==(const Unary& o) const { return op == o.op && sub == o.sub; }
bool Binary::operator==(const Binary& o) const { return op == o.op && sub == o.sub; }
bool ArrayType::operator==(const ArrayType& o) const { return elem == o.elem && count == o.count; }
bool VectorType::operator==(const VectorType& o) const { return elem == o.elem; }
bool RecordType::operator==(const RecordType& o) const { return fields == o.fields; }

const char* to_string(BinOp op) {
    switch (op) {
        case BinOp::Add: return "+";
        case BinOp::Sub: return "-";
        case BinOp::Mul: return "*";
        case BinOp::Div: return "/";
        case BinOp::Eq: return "==";
        case BinOp::Ne: return "!=";
        case BinOp::Lt: return "<";
        case BinOp::Le: return "<=";
        case BinOp::Gt: return ">";
        case BinOp::Ge: return ">=";
        case BinOp::And: return "and";
        case BinOp::Or: return "or";
    }
    return "?";
}

const char* to_string(UnOp op) { return op == UnOp::Neg ? "-" : "not"; }

namespace {

void path_to(std::ostringstream& out, const std::vector<std::string>& path) {
    for (size_t i = 0; i < path.size(); ++i) {
        if (i) out << '.';
        out << path[i];
    }
}

int precedence(BinOp op) {
    switch (op) {
        case BinOp::Or: return 1;
        case BinOp::And: return 2;
        case BinOp::Eq:
        case BinOp::Ne:
        case BinOp::Lt:
        case BinOp::Le:
        case BinOp::Gt:
        case BinOp::Ge: return 3;
        case BinOp::Add:
        case BinOp::Sub: return 4;
        case BinOp::Mul:
        case BinOp::Div: return 5;
    }
    return 0;
}

void expr_to(std::ostringstream& out, const Expr& e, int parent_prec) {
    if (auto* i = std::get_if<IntLit>(&e.node)) {
        out << int128_to_string(i->value);
    } else if (auto* b = std::get_if<BoolLit>(&e.node)) {
        out << (b->value ? "true" : "false");
    } else if (auto* f = std::get_if<FieldRef>(&e.node)) {
        path_to(out, f->path);
    } else if (auto* by = std::get_if<BytesOf>(&e.node)) {
        out << "bytes(";
        path_to(out, by->path);
        out << ')';
    } else if (auto* p = std::get_if<PredCall>(&e.node)) {
        out << p->name << '(';
        for (size_t i = 0; i < p->args.size(); ++i) {
            if (i) out << ", ";
            expr_to(out, p->args[i], 0);
        }
        out << ')';
    } else if (auto* u = std::get_if<Unary>(&e.node)) {
        out << to_string(u->op);
        if (u->op == UnOp::Not) out << ' ';
        expr_to(out, u->sub[0], 6);
    } else if (auto* bin = std::get_if<Binary>(&e.node)) {
        int prec = precedence(bin->op);
        bool parens = prec < parent_prec;
        if (parens) out << '(';
        expr_to(out, bin->sub[0], prec);
        out << ' ' << to_string(bin->op) << ' ';
        expr_to(out, bin->sub[1], prec + 1);
        if (parens) out << ')';
    }
}

void type_to(std::ostringstream& out, const TypeExpr& t, int indent);

void decl_to(std::ostringstream& out, const Decl& d, int indent) {
    out << std::string(static_cast<size_t>(indent), ' ') << d.name << " : ";
    type_to(out, d.type, indent);
    if (d.guard) {
        out << " | ";
        expr_to(out, *d.guard, 0);
    }
    if (d.constraint) {
        out << " | constraint(";
        expr_to(out, *d.constraint, 0);
        out << ')';
    }
    out << ";\n";
}

void type_to(std::ostringstream& out, const TypeExpr& t, int indent) {
    if (auto* u = std::get_if<UIntType>(&t.node)) {
        out << "uint(" << u->width_bits;
        if (u->order == ByteOrder::Lsbf) out << ", lsbf";
        out << ')';
    } else if (auto* a = std::get_if<ArrayType>(&t.node)) {
        out << "array(";
        type_to(out, a->elem[0], indent);
        out << ", ";
        expr_to(out, a->count, 0);
        out << ')';
    } else if (auto* v = std::get_if<VectorType>(&t.node)) {
        out << "vector(";
        type_to(out, v->elem[0], indent);
        out << ')';
    } else if (auto* r = std::get_if<RecordType>(&t.node)) {
        out << "record {\n";
        for (const auto& f : r->fields) decl_to(out, f, indent + 2);
        out << std::string(static_cast<size_t>(indent), ' ') << '}';
    } else if (auto* va = std::get_if<VariantType>(&t.node)) {
        out << "variant(";
        for (size_t i = 0; i < va->selectors.size(); ++i) {
            if (i) out << ", ";
            out << va->selectors[i];
        }
        out << ") {\n";
        for (const auto& arm : va->arms) {
            out << std::string(static_cast<size_t>(indent) + 2, ' ') << arm.name << " if ";
            expr_to(out, arm.pred, 0);
            out << ";\n";
        }
        out << std::string(static_cast<size_t>(indent), ' ') << '}';
    } else if (auto* n = std::get_if<NamedRef>(&t.node)) {
        out << n->name;
        if (!n->args.empty()) {
            out << '(';
            for (size_t i = 0; i < n->args.size(); ++i) {
                if (i) out << ", ";
                expr_to(out, n->args[i], 0);
            }
            out << ')';
        }
    }
}

}  // namespace

std::string to_string(const Expr& e) {
    std::ostringstream out;
    expr_to(out, e, 0);
    return out.str();
}

std::string to_string(const TypeExpr& t) {
    std::ostringstream out;
    type_to(out, t, 0);
    return out.str();
}

std::string to_string(const SpecModule& m) {
    std::ostringstream out;
    for (const auto& td : m.types) {
        out << "def " << td.name;
        if (!td.params.empty()) {
            out << '(';
            for (size_t i = 0; i < td.params.size(); ++i) {
                if (i) out << ", ";
                out << td.params[i].name << " : uint(" << td.params[i].width_bits << ')';
            }
            out << ')';
        }
        out << " = ";
        type_to(out, td.body, 0);
        out << ";\n\n";
    }
    for (const auto& pd : m.preds) {
        out << "pred " << pd.name << '(' << pd.param_name << " : " << pd.param_type << ") = ";
        expr_to(out, pd.body, 0);
        out << ";\n";
    }
    return out.str();
}

const TypeDef* SpecModule::find_type(const std::string& name) const {
    for (const auto& t : types)
        if (t.name == name) return &t;
    return nullptr;
}

const PredDef* SpecModule::find_pred(const std::string& name) const {
    for (const auto& p : preds)
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace msgc
