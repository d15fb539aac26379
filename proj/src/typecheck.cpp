#include "msgc/typecheck.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace msgc {

namespace {

enum class ExprKind { Int, Bool, Composite };

/// Where a path landed: a scalar (uint field or parameter) or a composite
/// field whose declared type is `type` (past any NamedRef indirection).
struct PathTarget {
    ExprKind kind = ExprKind::Int;
    const TypeExpr* type = nullptr;      // as declared (pre-resolution)
    std::string named_type;              // non-empty when declared via NamedRef
};

class Checker {
public:
    explicit Checker(SpecModule mod) : out_{std::move(mod), {}, {}, {}} {}

    Expected<TypedModule, std::vector<Diag>> run() {
        // Definitions are checked in merged declaration order so forward
        // references are rejected uniformly across files.
        struct Item {
            bool is_pred;
            size_t index;
            int seq;
        };
        std::vector<Item> items;
        for (size_t i = 0; i < out_.module.types.size(); ++i)
            items.push_back({false, i, out_.module.types[i].seq});
        for (size_t i = 0; i < out_.module.preds.size(); ++i)
            items.push_back({true, i, out_.module.preds[i].seq});
        std::sort(items.begin(), items.end(),
                  [](const Item& a, const Item& b) { return a.seq < b.seq; });

        for (const auto& item : items) {
            if (item.is_pred) {
                check_pred(out_.module.preds[item.index]);
            } else {
                check_typedef(out_.module.types[item.index]);
            }
        }
        if (!errors_.empty()) return errors_;
        return std::move(out_);
    }

private:
    void error(const std::string& code, int line, int col, const std::string& msg,
               const std::string& file = "") {
        errors_.push_back(Diag{Severity::Error, code, file, line, col, msg});
    }

    void warn(const std::string& code, int line, int col, const std::string& msg) {
        out_.warnings.push_back(Diag{Severity::Warning, code, "", line, col, msg});
    }

    bool defined_type(const std::string& name) const { return seen_types_.count(name) > 0; }

    void check_typedef(TypeDef& td) {
        if (seen_types_.count(td.name) || seen_preds_.count(td.name)) {
            error("T001", td.line, 0, "redefinition of '" + td.name + "'", td.file);
            return;
        }
        std::set<std::string> param_names;
        for (const auto& p : td.params) {
            if (!param_names.insert(p.name).second)
                error("T002", td.line, 0, "duplicate parameter '" + p.name + "'", td.file);
            if (p.width_bits < 1)
                error("T003", td.line, 0, "width must be >= 1", td.file);
            if (p.width_bits > 64)
                error("T003", td.line, 0, "width must be <= 64", td.file);
        }
        cur_def_ = &td;
        check_type_expr(td.body, /*fields=*/{}, /*constraint_allowed=*/false);
        cur_def_ = nullptr;

        TypeInfo info;
        info.name = td.name;
        info.params = td.params;
        for (const auto& p : td.params) info.dependencies.push_back(p.name);
        seen_types_.insert(td.name);
        out_.order.push_back(td.name);
        info.const_size_bits = size_of_type(td.body);
        out_.info[td.name] = std::move(info);
    }

    void check_pred(PredDef& pd) {
        if (seen_types_.count(pd.name) || seen_preds_.count(pd.name)) {
            error("T001", pd.line, 0, "redefinition of '" + pd.name + "'", pd.file);
            return;
        }
        const TypeDef* pt = out_.module.find_type(pd.param_type);
        if (pt == nullptr || !defined_type(pd.param_type)) {
            error("T004", pd.line, 0,
                  "'" + pd.param_type + "' is not defined before use (dependency order)", pd.file);
            seen_preds_.insert(pd.name);
            return;
        }
        // The predicate body sees the parameter as a composite value.
        pred_param_ = &pd;
        auto kind = check_expr(pd.body, {}, 0, /*allow_self=*/false);
        pred_param_ = nullptr;
        if (kind && *kind != ExprKind::Bool)
            error("T005", pd.body.line, pd.body.col, "predicate body must be boolean", pd.file);
        seen_preds_.insert(pd.name);
    }

    // `fields` is the enclosing record scope (all declared fields; visibility
    // is limited per expression by visible_count).
    void check_type_expr(TypeExpr& t, std::vector<Decl*> fields, bool constraint_allowed) {
        (void)constraint_allowed;
        if (auto* u = std::get_if<UIntType>(&t.node)) {
            if (u->width_bits < 1) error("T003", t.line, t.col, "width must be >= 1");
            if (u->width_bits > 64) error("T003", t.line, t.col, "width must be <= 64");
            if (u->order == ByteOrder::Lsbf && u->width_bits % 8 != 0)
                error("T003", t.line, t.col, "lsbf requires a whole-byte width");
            return;
        }
        if (auto* a = std::get_if<ArrayType>(&t.node)) {
            check_type_expr(a->elem[0], fields, false);
            auto kind = check_expr(a->count, fields, fields.size(), false);
            if (kind && *kind != ExprKind::Int)
                error("T006", a->count.line, a->count.col, "array count must be an integer");
            auto folded = fold_expr(a->count, fields);
            if (!folded) {
                error("T006", a->count.line, a->count.col,
                      "array count must be a constant expression");
            } else if (*folded < 0) {
                error("T006", a->count.line, a->count.col, "array count must be non-negative");
            }
            return;
        }
        if (auto* v = std::get_if<VectorType>(&t.node)) {
            check_type_expr(v->elem[0], fields, false);
            auto elem_size = size_of_type(v->elem[0]);
            if (elem_size && *elem_size % 8 != 0)
                error("T007", t.line, t.col,
                      "vector element type must occupy a whole number of bytes");
            return;
        }
        if (auto* r = std::get_if<RecordType>(&t.node)) {
            std::set<std::string> names;
            std::vector<Decl*> local;
            for (auto& f : r->fields) {
                if (!names.insert(f.name).second)
                    error("T008", f.line, f.col, "duplicate field '" + f.name + "'");
                check_type_expr(f.type, local, true);
                // Specifier expressions (constraint) see strictly earlier
                // fields; the guard also sees the field itself.
                if (f.constraint) {
                    if (std::holds_alternative<UIntType>(f.type.node) ||
                        std::holds_alternative<ArrayType>(f.type.node)) {
                        error("T009", f.line, f.col,
                              "constraint cannot apply to uint or array fields");
                    }
                    auto kind = check_expr(*f.constraint, local, local.size(), false);
                    if (kind && *kind != ExprKind::Int)
                        error("T010", f.constraint->line, f.constraint->col,
                              "constraint amount must be an integer");
                }
                local.push_back(&f);
                if (f.guard) {
                    auto kind = check_expr(*f.guard, local, local.size(), true);
                    if (kind && *kind != ExprKind::Bool)
                        error("T010", f.guard->line, f.guard->col, "guard must be boolean");
                }
            }
            return;
        }
        if (auto* va = std::get_if<VariantType>(&t.node)) {
            if (cur_def_ == nullptr) {
                error("T011", t.line, t.col, "variant must be the body of a named definition");
                return;
            }
            for (const auto& sel : va->selectors) {
                bool found = false;
                for (const auto& p : cur_def_->params)
                    if (p.name == sel) found = true;
                if (!found)
                    error("T011", t.line, t.col,
                          "selector '" + sel + "' is not a parameter of '" + cur_def_->name + "'");
            }
            std::set<std::string> arm_names;
            std::vector<std::string> seen_preds_text;
            for (auto& arm : va->arms) {
                if (!arm_names.insert(arm.name).second)
                    error("T012", t.line, t.col, "duplicate arm '" + arm.name + "'");
                if (!defined_type(arm.name)) {
                    error("T004", arm.pred.line, arm.pred.col,
                          "'" + arm.name + "' is not defined before use (dependency order)");
                } else if (const TypeDef* at = out_.module.find_type(arm.name);
                           at != nullptr && !at->params.empty()) {
                    // Arms are bare names; there is no syntax to bind arguments.
                    error("T014", arm.pred.line, arm.pred.col,
                          "arm '" + arm.name + "' refers to a parameterized definition");
                }
                auto kind = check_expr(arm.pred, {}, 0, false);
                if (kind && *kind != ExprKind::Bool)
                    error("T010", arm.pred.line, arm.pred.col, "arm predicate must be boolean");
                std::string text = to_string(arm.pred);
                for (const auto& prev : seen_preds_text) {
                    if (prev == text)
                        warn("T013", arm.pred.line, arm.pred.col,
                             "arm predicate duplicates an earlier arm; the first true arm wins");
                }
                seen_preds_text.push_back(text);
            }
            return;
        }
        if (auto* n = std::get_if<NamedRef>(&t.node)) {
            if (!defined_type(n->name)) {
                error("T004", t.line, t.col,
                      "'" + n->name + "' is not defined before use (dependency order)");
                return;
            }
            const TypeDef* target = out_.module.find_type(n->name);
            if (n->args.size() != target->params.size()) {
                std::ostringstream msg;
                msg << "'" << n->name << "' expects " << target->params.size()
                    << " argument(s), got " << n->args.size();
                error("T014", t.line, t.col, msg.str());
            }
            for (auto& a : n->args) {
                auto kind = check_expr(a, fields, fields.size(), false);
                if (kind && *kind != ExprKind::Int)
                    error("T010", a.line, a.col, "type argument must be an integer");
            }
            return;
        }
    }

    // ------------------------------------------------------------------
    // Expressions
    // ------------------------------------------------------------------

    std::optional<ExprKind> check_expr(Expr& e, const std::vector<Decl*>& fields,
                                       size_t visible_count, bool allow_self) {
        if (std::holds_alternative<IntLit>(e.node)) return ExprKind::Int;
        if (std::holds_alternative<BoolLit>(e.node)) return ExprKind::Bool;
        if (auto* f = std::get_if<FieldRef>(&e.node)) {
            auto target = resolve_path(f->path, fields, visible_count, allow_self, e.line, e.col);
            if (!target) return std::nullopt;
            f->kind = target->kind == ExprKind::Int && target->type == nullptr ? RefKind::Param
                                                                               : RefKind::Field;
            return target->kind;
        }
        if (auto* b = std::get_if<BytesOf>(&e.node)) {
            auto target = resolve_path(b->path, fields, visible_count, allow_self, e.line, e.col);
            if (!target) return std::nullopt;
            if (target->type == nullptr) {
                error("T015", e.line, e.col, "bytes() requires a field, not a parameter");
                return std::nullopt;
            }
            return ExprKind::Int;
        }
        if (auto* p = std::get_if<PredCall>(&e.node)) {
            if (!seen_preds_.count(p->name)) {
                error("T004", e.line, e.col,
                      "'" + p->name + "' is not defined before use (dependency order)");
                return std::nullopt;
            }
            const PredDef* pd = out_.module.find_pred(p->name);
            if (p->args.size() != 1) {
                error("T014", e.line, e.col, "predicate '" + p->name + "' takes one argument");
                return std::nullopt;
            }
            auto* arg_ref = std::get_if<FieldRef>(&p->args[0].node);
            if (arg_ref == nullptr) {
                error("T015", e.line, e.col, "predicate argument must be a field reference");
                return std::nullopt;
            }
            auto target = resolve_path(arg_ref->path, fields, visible_count, allow_self,
                                       p->args[0].line, p->args[0].col);
            if (!target) return std::nullopt;
            arg_ref->kind = RefKind::Field;
            if (target->named_type != pd->param_type) {
                error("T015", e.line, e.col,
                      "predicate '" + p->name + "' expects a field of type '" + pd->param_type +
                          "'");
                return std::nullopt;
            }
            return ExprKind::Bool;
        }
        if (auto* u = std::get_if<Unary>(&e.node)) {
            auto sub = check_expr(u->sub[0], fields, visible_count, allow_self);
            if (!sub) return std::nullopt;
            if (u->op == UnOp::Neg && *sub != ExprKind::Int) {
                error("T010", e.line, e.col, "negation requires an integer operand");
                return std::nullopt;
            }
            if (u->op == UnOp::Not && *sub != ExprKind::Bool) {
                error("T010", e.line, e.col, "'not' requires a boolean operand");
                return std::nullopt;
            }
            return *sub;
        }
        if (auto* bin = std::get_if<Binary>(&e.node)) {
            auto lhs = check_expr(bin->sub[0], fields, visible_count, allow_self);
            auto rhs = check_expr(bin->sub[1], fields, visible_count, allow_self);
            if (!lhs || !rhs) return std::nullopt;
            switch (bin->op) {
                case BinOp::Add:
                case BinOp::Sub:
                case BinOp::Mul:
                case BinOp::Div:
                    if (*lhs != ExprKind::Int || *rhs != ExprKind::Int) {
                        error("T010", e.line, e.col, "arithmetic requires integer operands");
                        return std::nullopt;
                    }
                    return ExprKind::Int;
                case BinOp::Eq:
                case BinOp::Ne:
                case BinOp::Lt:
                case BinOp::Le:
                case BinOp::Gt:
                case BinOp::Ge:
                    if (*lhs != ExprKind::Int || *rhs != ExprKind::Int) {
                        error("T010", e.line, e.col, "comparison requires integer operands");
                        return std::nullopt;
                    }
                    return ExprKind::Bool;
                case BinOp::And:
                case BinOp::Or:
                    if (*lhs != ExprKind::Bool || *rhs != ExprKind::Bool) {
                        error("T010", e.line, e.col, "'and'/'or' require boolean operands");
                        return std::nullopt;
                    }
                    return ExprKind::Bool;
            }
        }
        return std::nullopt;
    }

    // Resolve a dotted path against the visible record fields, the enclosing
    // definition's parameters, and (inside predicate bodies) the predicate
    // parameter.
    std::optional<PathTarget> resolve_path(const std::vector<std::string>& path,
                                           const std::vector<Decl*>& fields, size_t visible_count,
                                           bool allow_self, int line, int col) {
        const std::string& head = path[0];
        // Predicate parameter.
        if (pred_param_ != nullptr && head == pred_param_->param_name) {
            const TypeDef* td = out_.module.find_type(pred_param_->param_type);
            if (td == nullptr) return std::nullopt;
            return descend(&td->body, pred_param_->param_type, path, 1, line, col);
        }
        // Definition parameter: plain integer, no descent.
        if (cur_def_ != nullptr) {
            for (const auto& p : cur_def_->params) {
                if (p.name == head) {
                    if (path.size() > 1) {
                        error("T015", line, col, "parameter '" + head + "' has no fields");
                        return std::nullopt;
                    }
                    PathTarget t;
                    t.kind = ExprKind::Int;
                    t.type = nullptr;  // marks a parameter
                    return t;
                }
            }
        }
        // Record field, visible prefix only.
        size_t limit = allow_self ? visible_count : std::min(visible_count, fields.size());
        for (size_t i = 0; i < limit && i < fields.size(); ++i) {
            if (fields[i]->name == head)
                return descend(&fields[i]->type, named_of(fields[i]->type), path, 1, line, col);
        }
        error("T016", line, col, "unknown name '" + head + "' (fields must be declared earlier)");
        return std::nullopt;
    }

    static std::string named_of(const TypeExpr& t) {
        if (auto* n = std::get_if<NamedRef>(&t.node)) return n->name;
        return "";
    }

    std::optional<PathTarget> descend(const TypeExpr* type, std::string named,
                                      const std::vector<std::string>& path, size_t idx, int line,
                                      int col) {
        // Walk through NamedRef indirections to the underlying shape.
        const TypeExpr* cur = type;
        while (auto* n = std::get_if<NamedRef>(&cur->node)) {
            const TypeDef* td = out_.module.find_type(n->name);
            if (td == nullptr) return std::nullopt;  // already reported
            named = n->name;
            cur = &td->body;
        }
        if (idx == path.size()) {
            PathTarget t;
            if (std::holds_alternative<UIntType>(cur->node)) {
                t.kind = ExprKind::Int;
                t.type = type;
            } else {
                t.kind = ExprKind::Composite;
                t.type = type;
                t.named_type = named;
            }
            return t;
        }
        auto* rec = std::get_if<RecordType>(&cur->node);
        if (rec == nullptr) {
            error("T015", line, col, "'" + path[idx - 1] + "' has no field '" + path[idx] + "'");
            return std::nullopt;
        }
        for (const auto& f : rec->fields) {
            if (f.name == path[idx]) return descend(&f.type, named_of(f.type), path, idx + 1, line, col);
        }
        error("T016", line, col, "no field '" + path[idx] + "' in '" + path[idx - 1] + "'");
        return std::nullopt;
    }

    // ------------------------------------------------------------------
    // Sizes and folding
    // ------------------------------------------------------------------

    std::optional<Int128> fold_expr(const Expr& e, const std::vector<Decl*>& fields) {
        std::vector<Decl> copy;
        copy.reserve(fields.size());
        for (auto* f : fields) copy.push_back(*f);
        return const_fold(out_, copy, e);
    }

    std::optional<int64_t> size_of_type(const TypeExpr& t) { return const_size_bits_of(out_, t); }

    TypedModule out_;
    std::vector<Diag> errors_;
    std::set<std::string> seen_types_;
    std::set<std::string> seen_preds_;
    const TypeDef* cur_def_ = nullptr;
    const PredDef* pred_param_ = nullptr;
};

}  // namespace

Expected<TypedModule, std::vector<Diag>> typecheck(const SpecModule& parsed) {
    Checker c(parsed);
    return c.run();
}

Expected<std::optional<int64_t>, Diag> constant_size_of(const TypedModule& typed,
                                                        const std::string& type_name) {
    const TypeInfo* info = typed.find_info(type_name);
    if (info == nullptr)
        return Expected<std::optional<int64_t>, Diag>(
            Diag{Severity::Error, "T017", "", 0, 0, "unknown type '" + type_name + "'"});
    return Expected<std::optional<int64_t>, Diag>(info->const_size_bits);
}

std::optional<int64_t> const_size_bits_of(const TypedModule& typed, const TypeExpr& t) {
    if (auto* u = std::get_if<UIntType>(&t.node)) return u->width_bits;
    if (auto* a = std::get_if<ArrayType>(&t.node)) {
        auto elem = const_size_bits_of(typed, a->elem[0]);
        auto count = const_fold(typed, {}, a->count);
        if (!elem || !count) return std::nullopt;
        Int128 total = static_cast<Int128>(*elem) * *count;
        if (total < 0 || total > (Int128(1) << 40)) return std::nullopt;
        return static_cast<int64_t>(total);
    }
    if (std::holds_alternative<VectorType>(t.node)) return std::nullopt;
    if (std::holds_alternative<VariantType>(t.node)) return std::nullopt;
    if (auto* r = std::get_if<RecordType>(&t.node)) {
        int64_t total = 0;
        for (const auto& f : r->fields) {
            if (f.constraint) {
                // A constrained field consumes exactly the constraint amount.
                auto folded = const_fold(typed, r->fields, *f.constraint);
                if (!folded || *folded < 0) return std::nullopt;
                total += static_cast<int64_t>(*folded) * 8;
                continue;
            }
            auto fs = const_size_bits_of(typed, f.type);
            if (!fs) return std::nullopt;
            total += *fs;
        }
        return total;
    }
    if (auto* n = std::get_if<NamedRef>(&t.node)) {
        const TypeInfo* info = typed.find_info(n->name);
        if (info == nullptr) return std::nullopt;
        return info->const_size_bits;
    }
    return std::nullopt;
}

std::optional<Int128> const_fold(const TypedModule& typed, const std::vector<Decl>& scope_fields,
                                 const Expr& e) {
    if (auto* i = std::get_if<IntLit>(&e.node)) return i->value;
    if (auto* u = std::get_if<Unary>(&e.node)) {
        if (u->op != UnOp::Neg) return std::nullopt;
        auto sub = const_fold(typed, scope_fields, u->sub[0]);
        if (!sub) return std::nullopt;
        return checked_sub(0, *sub);
    }
    if (auto* b = std::get_if<BytesOf>(&e.node)) {
        // Folds when the referenced field's type has a constant size.
        if (b->path.empty()) return std::nullopt;
        const Decl* field = nullptr;
        for (const auto& f : scope_fields)
            if (f.name == b->path[0]) field = &f;
        if (field == nullptr) return std::nullopt;
        const TypeExpr* cur = &field->type;
        const TypedModule& tm = typed;
        for (size_t idx = 1; idx < b->path.size(); ++idx) {
            while (auto* n = std::get_if<NamedRef>(&cur->node)) {
                const TypeDef* td = tm.find_type(n->name);
                if (td == nullptr) return std::nullopt;
                cur = &td->body;
            }
            auto* rec = std::get_if<RecordType>(&cur->node);
            if (rec == nullptr) return std::nullopt;
            const Decl* next = nullptr;
            for (const auto& f : rec->fields)
                if (f.name == b->path[idx]) next = &f;
            if (next == nullptr) return std::nullopt;
            cur = &next->type;
        }
        auto bits = const_size_bits_of(tm, *cur);
        if (!bits || *bits % 8 != 0) return std::nullopt;
        return Int128(*bits / 8);
    }
    if (auto* bin = std::get_if<Binary>(&e.node)) {
        auto lhs = const_fold(typed, scope_fields, bin->sub[0]);
        auto rhs = const_fold(typed, scope_fields, bin->sub[1]);
        if (!lhs || !rhs) return std::nullopt;
        switch (bin->op) {
            case BinOp::Add: return checked_add(*lhs, *rhs);
            case BinOp::Sub: return checked_sub(*lhs, *rhs);
            case BinOp::Mul: return checked_mul(*lhs, *rhs);
            case BinOp::Div: return checked_div(*lhs, *rhs);
            default: return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace msgc
