#include "msgc/parser.hpp"

#include <cctype>
#include <unordered_set>

namespace msgc {

namespace {

enum class Tok {
    Ident,
    Int,
    Punct,  // one of ( ) { } , ; : . |
    Op,     // == != <= >= < > + - * /
    Eof,
};

struct Token {
    Tok kind = Tok::Eof;
    std::string text;
    Int128 int_value = 0;
    int line = 1;
    int col = 1;
};

const std::unordered_set<std::string>& keywords() {
    static const std::unordered_set<std::string> kw = {
        "def", "pred", "record", "variant", "vector", "array", "uint", "constraint",
        "bytes", "if", "and", "or", "not", "true", "false", "msbf", "lsbf",
    };
    return kw;
}

class Lexer {
public:
    Lexer(std::string_view src, const std::string& file) : src_(src), file_(file) {}

    Expected<Token, Diag> next() {
        skip_ws();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::Eof;
            return t;
        }
        char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                take();
            t.kind = Tok::Ident;
            t.text = std::string(src_.substr(start, pos_ - start));
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) return lex_int(t);
        static const std::string puncts = "(){},;:.|";
        if (puncts.find(c) != std::string::npos) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            take();
            return t;
        }
        auto two = [&](char a, char b) {
            return c == a && pos_ + 1 < src_.size() && src_[pos_ + 1] == b;
        };
        if (two('=', '=') || two('!', '=') || two('<', '=') || two('>', '=')) {
            t.kind = Tok::Op;
            t.text = std::string(src_.substr(pos_, 2));
            take();
            take();
            return t;
        }
        static const std::string ops = "<>+-*/=";
        if (ops.find(c) != std::string::npos) {
            t.kind = Tok::Op;
            t.text = std::string(1, c);
            take();
            return t;
        }
        return err(t.line, t.col, std::string("unexpected character '") + c + "'");
    }

private:
    void take() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') take();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                take();
            } else {
                break;
            }
        }
    }

    Expected<Token, Diag> lex_int(Token t) {
        t.kind = Tok::Int;
        Int128 v = 0;
        if (src_[pos_] == '0' && pos_ + 1 < src_.size() &&
            (src_[pos_ + 1] == 'x' || src_[pos_ + 1] == 'X')) {
            take();
            take();
            size_t digits = 0;
            while (pos_ < src_.size() && std::isxdigit(static_cast<unsigned char>(src_[pos_]))) {
                char c = src_[pos_];
                int d = std::isdigit(static_cast<unsigned char>(c))
                            ? c - '0'
                            : std::tolower(static_cast<unsigned char>(c)) - 'a' + 10;
                auto m = checked_mul(v, 16);
                if (!m) return err(t.line, t.col, "integer literal too large");
                auto a = checked_add(*m, d);
                if (!a) return err(t.line, t.col, "integer literal too large");
                v = *a;
                ++digits;
                take();
            }
            if (digits == 0) return err(t.line, t.col, "malformed hex literal");
        } else {
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                auto m = checked_mul(v, 10);
                if (!m) return err(t.line, t.col, "integer literal too large");
                auto a = checked_add(*m, src_[pos_] - '0');
                if (!a) return err(t.line, t.col, "integer literal too large");
                v = *a;
                take();
            }
        }
        t.int_value = v;
        return t;
    }

    Diag err(int line, int col, const std::string& msg) {
        return Diag{Severity::Error, "P001", file_, line, col, msg};
    }

    std::string_view src_;
    std::string file_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Recursive descent over the token stream. One token of lookahead.
class Parser {
public:
    Parser(std::string_view src, const std::string& file) : lex_(src, file), file_(file) {}

    Expected<SpecModule, Diag> parse_module() {
        if (auto d = prime()) return *d;
        SpecModule mod;
        int seq = 0;
        while (cur_.kind != Tok::Eof) {
            if (is_ident("def")) {
                auto td = parse_typedef();
                if (!td.ok()) return td.error();
                td.value().seq = seq++;
                mod.types.push_back(std::move(td.value()));
            } else if (is_ident("pred")) {
                auto pd = parse_preddef();
                if (!pd.ok()) return pd.error();
                pd.value().seq = seq++;
                mod.preds.push_back(std::move(pd.value()));
            } else {
                return err("expected 'def' or 'pred'");
            }
        }
        return mod;
    }

    Expected<Expr, Diag> parse_standalone_expr() {
        if (auto d = prime()) return *d;
        auto e = parse_expr();
        if (!e.ok()) return e;
        if (cur_.kind != Tok::Eof) return err("trailing input after expression");
        return e;
    }

private:
    std::optional<Diag> prime() {
        auto t = lex_.next();
        if (!t.ok()) return t.error();
        cur_ = t.value();
        return std::nullopt;
    }

    std::optional<Diag> bump() { return prime(); }

    bool is_ident(const char* kw) const { return cur_.kind == Tok::Ident && cur_.text == kw; }
    bool is_punct(const char* p) const { return cur_.kind == Tok::Punct && cur_.text == p; }
    bool is_op(const char* p) const { return cur_.kind == Tok::Op && cur_.text == p; }

    Diag err(const std::string& msg) const {
        return Diag{Severity::Error, "P001", file_, cur_.line, cur_.col, msg};
    }

    Expected<bool, Diag> expect_punct(const char* p) {
        if (!is_punct(p)) return err(std::string("expected '") + p + "'");
        if (auto d = bump()) return *d;
        return true;
    }

    Expected<std::string, Diag> expect_name(const char* what) {
        if (cur_.kind != Tok::Ident) return Expected<std::string, Diag>(err(std::string("expected ") + what));
        if (keywords().count(cur_.text))
            return Expected<std::string, Diag>(
                err("keyword '" + cur_.text + "' cannot be used as " + what));
        std::string name = cur_.text;
        if (auto d = bump()) return Expected<std::string, Diag>(*d);
        return name;
    }

    Expected<int, Diag> expect_int_literal(const char* what) {
        if (cur_.kind != Tok::Int) return Expected<int, Diag>(err(std::string("expected ") + what));
        Int128 v = cur_.int_value;
        if (v < 0 || v > 1'000'000) return Expected<int, Diag>(err(std::string(what) + " out of range"));
        if (auto d = bump()) return Expected<int, Diag>(*d);
        return static_cast<int>(v);
    }

    // def Name [ (params) ] = type-expr ;
    Expected<TypeDef, Diag> parse_typedef() {
        TypeDef td;
        td.file = file_;
        td.line = cur_.line;
        if (auto d = bump()) return *d;  // 'def'
        auto name = expect_name("type name");
        if (!name.ok()) return name.error();
        td.name = name.value();
        if (is_punct("(")) {
            if (auto d = bump()) return *d;
            while (true) {
                auto p = parse_param();
                if (!p.ok()) return p.error();
                td.params.push_back(p.value());
                if (is_punct(",")) {
                    if (auto d = bump()) return *d;
                    continue;
                }
                break;
            }
            if (auto e = expect_punct(")"); !e.ok()) return e.error();
        }
        if (!is_op("=")) return err("expected '='");
        if (auto d = bump()) return *d;
        auto body = parse_type_expr();
        if (!body.ok()) return body.error();
        td.body = std::move(body.value());
        if (auto e = expect_punct(";"); !e.ok()) return e.error();
        return td;
    }

    Expected<ParamDecl, Diag> parse_param() {
        ParamDecl pd;
        auto name = expect_name("parameter name");
        if (!name.ok()) return name.error();
        pd.name = name.value();
        if (auto e = expect_punct(":"); !e.ok()) return e.error();
        if (!is_ident("uint")) return err("parameter type must be uint(WIDTH)");
        if (auto d = bump()) return *d;
        if (auto e = expect_punct("("); !e.ok()) return e.error();
        auto w = expect_int_literal("parameter width");
        if (!w.ok()) return w.error();
        pd.width_bits = w.value();
        if (is_punct(",")) {  // optional byte order, ignored for parameters
            if (auto d = bump()) return *d;
            if (!is_ident("msbf") && !is_ident("lsbf")) return err("expected msbf or lsbf");
            if (auto d = bump()) return *d;
        }
        if (auto e = expect_punct(")"); !e.ok()) return e.error();
        return pd;
    }

    // pred name ( param : TypeName ) = expr ;
    Expected<PredDef, Diag> parse_preddef() {
        PredDef pd;
        pd.file = file_;
        pd.line = cur_.line;
        if (auto d = bump()) return *d;  // 'pred'
        auto name = expect_name("predicate name");
        if (!name.ok()) return name.error();
        pd.name = name.value();
        if (auto e = expect_punct("("); !e.ok()) return e.error();
        auto pn = expect_name("parameter name");
        if (!pn.ok()) return pn.error();
        pd.param_name = pn.value();
        if (auto e = expect_punct(":"); !e.ok()) return e.error();
        auto pt = expect_name("parameter type name");
        if (!pt.ok()) return pt.error();
        pd.param_type = pt.value();
        if (auto e = expect_punct(")"); !e.ok()) return e.error();
        if (!is_op("=")) return err("expected '='");
        if (auto d = bump()) return *d;
        auto body = parse_expr();
        if (!body.ok()) return body.error();
        pd.body = std::move(body.value());
        if (auto e = expect_punct(";"); !e.ok()) return e.error();
        return pd;
    }

    Expected<TypeExpr, Diag> parse_type_expr() {
        TypeExpr t;
        t.line = cur_.line;
        t.col = cur_.col;
        if (is_ident("uint")) {
            if (auto d = bump()) return *d;
            if (auto e = expect_punct("("); !e.ok()) return e.error();
            auto w = expect_int_literal("bit width");
            if (!w.ok()) return w.error();
            UIntType u;
            u.width_bits = w.value();
            if (is_punct(",")) {
                if (auto d = bump()) return *d;
                if (is_ident("msbf")) {
                    u.order = ByteOrder::Msbf;
                } else if (is_ident("lsbf")) {
                    u.order = ByteOrder::Lsbf;
                } else {
                    return err("expected msbf or lsbf");
                }
                if (auto d = bump()) return *d;
            }
            if (auto e = expect_punct(")"); !e.ok()) return e.error();
            t.node = u;
            return t;
        }
        if (is_ident("array")) {
            if (auto d = bump()) return *d;
            if (auto e = expect_punct("("); !e.ok()) return e.error();
            auto elem = parse_type_expr();
            if (!elem.ok()) return elem;
            if (auto e = expect_punct(","); !e.ok()) return e.error();
            auto count = parse_expr();
            if (!count.ok()) return count.error();
            if (auto e = expect_punct(")"); !e.ok()) return e.error();
            ArrayType a;
            a.elem.push_back(std::move(elem.value()));
            a.count = std::move(count.value());
            t.node = std::move(a);
            return t;
        }
        if (is_ident("vector")) {
            if (auto d = bump()) return *d;
            if (auto e = expect_punct("("); !e.ok()) return e.error();
            auto elem = parse_type_expr();
            if (!elem.ok()) return elem;
            if (auto e = expect_punct(")"); !e.ok()) return e.error();
            VectorType v;
            v.elem.push_back(std::move(elem.value()));
            t.node = std::move(v);
            return t;
        }
        if (is_ident("record")) {
            if (auto d = bump()) return *d;
            if (auto e = expect_punct("{"); !e.ok()) return e.error();
            RecordType r;
            while (!is_punct("}")) {
                auto decl = parse_decl();
                if (!decl.ok()) return decl.error();
                r.fields.push_back(std::move(decl.value()));
            }
            if (auto d = bump()) return *d;  // '}'
            if (r.fields.empty()) return err("empty record is not allowed");
            t.node = std::move(r);
            return t;
        }
        if (is_ident("variant")) {
            if (auto d = bump()) return *d;
            if (auto e = expect_punct("("); !e.ok()) return e.error();
            VariantType v;
            while (true) {
                auto sel = expect_name("selector parameter name");
                if (!sel.ok()) return sel.error();
                v.selectors.push_back(sel.value());
                if (is_punct(",")) {
                    if (auto d = bump()) return *d;
                    continue;
                }
                break;
            }
            if (auto e = expect_punct(")"); !e.ok()) return e.error();
            if (auto e = expect_punct("{"); !e.ok()) return e.error();
            while (!is_punct("}")) {
                auto arm_name = expect_name("arm type name");
                if (!arm_name.ok()) return arm_name.error();
                if (!is_ident("if")) return err("expected 'if' after arm name");
                if (auto d = bump()) return *d;
                auto pred = parse_expr();
                if (!pred.ok()) return pred.error();
                if (auto e = expect_punct(";"); !e.ok()) return e.error();
                v.arms.push_back(VariantArm{arm_name.value(), std::move(pred.value())});
            }
            if (auto d = bump()) return *d;  // '}'
            if (v.arms.empty()) return err("variant needs at least one arm");
            t.node = std::move(v);
            return t;
        }
        // Named reference.
        auto name = expect_name("type expression");
        if (!name.ok()) return name.error();
        NamedRef n;
        n.name = name.value();
        if (is_punct("(")) {
            if (auto d = bump()) return *d;
            while (true) {
                auto a = parse_expr();
                if (!a.ok()) return a.error();
                n.args.push_back(std::move(a.value()));
                if (is_punct(",")) {
                    if (auto d = bump()) return *d;
                    continue;
                }
                break;
            }
            if (auto e = expect_punct(")"); !e.ok()) return e.error();
        }
        t.node = std::move(n);
        return t;
    }

    // name : type-expr [ | guard-expr ] [ | constraint(expr) ] ;
    Expected<Decl, Diag> parse_decl() {
        Decl d;
        d.line = cur_.line;
        d.col = cur_.col;
        auto name = expect_name("field name");
        if (!name.ok()) return name.error();
        d.name = name.value();
        if (auto e = expect_punct(":"); !e.ok()) return e.error();
        auto ty = parse_type_expr();
        if (!ty.ok()) return ty.error();
        d.type = std::move(ty.value());
        bool saw_constraint = false;
        while (is_punct("|")) {
            if (auto dg = bump()) return *dg;
            if (is_ident("constraint")) {
                if (saw_constraint) return err("duplicate constraint specifier");
                saw_constraint = true;
                if (auto dg = bump()) return *dg;
                if (auto e = expect_punct("("); !e.ok()) return e.error();
                auto c = parse_expr();
                if (!c.ok()) return c.error();
                if (auto e = expect_punct(")"); !e.ok()) return e.error();
                d.constraint = std::move(c.value());
            } else {
                if (saw_constraint) return err("guard must come before the constraint specifier");
                if (d.guard) return err("duplicate guard expression");
                auto g = parse_expr();
                if (!g.ok()) return g.error();
                d.guard = std::move(g.value());
            }
        }
        if (auto e = expect_punct(";"); !e.ok()) return e.error();
        return d;
    }

    // Expression grammar, lowest precedence first.
    Expected<Expr, Diag> parse_expr() { return parse_or(); }

    Expected<Expr, Diag> parse_or() {
        auto lhs = parse_and();
        if (!lhs.ok()) return lhs;
        while (is_ident("or")) {
            int line = cur_.line, col = cur_.col;
            if (auto d = bump()) return *d;
            auto rhs = parse_and();
            if (!rhs.ok()) return rhs;
            lhs = make_binary(BinOp::Or, std::move(lhs.value()), std::move(rhs.value()), line, col);
        }
        return lhs;
    }

    Expected<Expr, Diag> parse_and() {
        auto lhs = parse_not();
        if (!lhs.ok()) return lhs;
        while (is_ident("and")) {
            int line = cur_.line, col = cur_.col;
            if (auto d = bump()) return *d;
            auto rhs = parse_not();
            if (!rhs.ok()) return rhs;
            lhs = make_binary(BinOp::And, std::move(lhs.value()), std::move(rhs.value()), line, col);
        }
        return lhs;
    }

    Expected<Expr, Diag> parse_not() {
        if (is_ident("not")) {
            int line = cur_.line, col = cur_.col;
            if (auto d = bump()) return *d;
            auto sub = parse_not();
            if (!sub.ok()) return sub;
            Expr e;
            e.line = line;
            e.col = col;
            Unary u;
            u.op = UnOp::Not;
            u.sub.push_back(std::move(sub.value()));
            e.node = std::move(u);
            return e;
        }
        return parse_cmp();
    }

    Expected<Expr, Diag> parse_cmp() {
        auto lhs = parse_add();
        if (!lhs.ok()) return lhs;
        static const std::pair<const char*, BinOp> cmps[] = {
            {"==", BinOp::Eq}, {"!=", BinOp::Ne}, {"<=", BinOp::Le},
            {">=", BinOp::Ge}, {"<", BinOp::Lt},  {">", BinOp::Gt},
        };
        for (const auto& [text, op] : cmps) {
            if (is_op(text)) {
                int line = cur_.line, col = cur_.col;
                if (auto d = bump()) return *d;
                auto rhs = parse_add();
                if (!rhs.ok()) return rhs;
                return make_binary(op, std::move(lhs.value()), std::move(rhs.value()), line, col);
            }
        }
        return lhs;
    }

    Expected<Expr, Diag> parse_add() {
        auto lhs = parse_mul();
        if (!lhs.ok()) return lhs;
        while (is_op("+") || is_op("-")) {
            BinOp op = is_op("+") ? BinOp::Add : BinOp::Sub;
            int line = cur_.line, col = cur_.col;
            if (auto d = bump()) return *d;
            auto rhs = parse_mul();
            if (!rhs.ok()) return rhs;
            lhs = make_binary(op, std::move(lhs.value()), std::move(rhs.value()), line, col);
        }
        return lhs;
    }

    Expected<Expr, Diag> parse_mul() {
        auto lhs = parse_unary();
        if (!lhs.ok()) return lhs;
        while (is_op("*") || is_op("/")) {
            BinOp op = is_op("*") ? BinOp::Mul : BinOp::Div;
            int line = cur_.line, col = cur_.col;
            if (auto d = bump()) return *d;
            auto rhs = parse_unary();
            if (!rhs.ok()) return rhs;
            lhs = make_binary(op, std::move(lhs.value()), std::move(rhs.value()), line, col);
        }
        return lhs;
    }

    Expected<Expr, Diag> parse_unary() {
        if (is_op("-")) {
            int line = cur_.line, col = cur_.col;
            if (auto d = bump()) return *d;
            auto sub = parse_unary();
            if (!sub.ok()) return sub;
            Expr e;
            e.line = line;
            e.col = col;
            Unary u;
            u.op = UnOp::Neg;
            u.sub.push_back(std::move(sub.value()));
            e.node = std::move(u);
            return e;
        }
        return parse_primary();
    }

    Expected<Expr, Diag> parse_primary() {
        Expr e;
        e.line = cur_.line;
        e.col = cur_.col;
        if (cur_.kind == Tok::Int) {
            e.node = IntLit{cur_.int_value};
            if (auto d = bump()) return *d;
            return e;
        }
        if (is_ident("true") || is_ident("false")) {
            e.node = BoolLit{cur_.text == "true"};
            if (auto d = bump()) return *d;
            return e;
        }
        if (is_punct("(")) {
            if (auto d = bump()) return *d;
            auto inner = parse_expr();
            if (!inner.ok()) return inner;
            if (auto ex = expect_punct(")"); !ex.ok()) return ex.error();
            return inner;
        }
        if (is_ident("bytes")) {
            if (auto d = bump()) return *d;
            if (auto ex = expect_punct("("); !ex.ok()) return ex.error();
            auto path = parse_path();
            if (!path.ok()) return path.error();
            if (auto ex = expect_punct(")"); !ex.ok()) return ex.error();
            e.node = BytesOf{path.value()};
            return e;
        }
        if (cur_.kind == Tok::Ident && !keywords().count(cur_.text)) {
            // Either a dotted path or a predicate call.
            std::string first = cur_.text;
            if (auto d = bump()) return *d;
            if (is_punct("(")) {
                if (auto d = bump()) return *d;
                PredCall call;
                call.name = first;
                while (!is_punct(")")) {
                    auto a = parse_expr();
                    if (!a.ok()) return a;
                    call.args.push_back(std::move(a.value()));
                    if (is_punct(",")) {
                        if (auto d = bump()) return *d;
                        continue;
                    }
                    break;
                }
                if (auto ex = expect_punct(")"); !ex.ok()) return ex.error();
                e.node = std::move(call);
                return e;
            }
            FieldRef ref;
            ref.path.push_back(first);
            while (is_punct(".")) {
                if (auto d = bump()) return *d;
                auto part = expect_name("path component");
                if (!part.ok()) return part.error();
                ref.path.push_back(part.value());
            }
            e.node = std::move(ref);
            return e;
        }
        return err("expected expression");
    }

    Expected<std::vector<std::string>, Diag> parse_path() {
        std::vector<std::string> path;
        auto first = expect_name("path");
        if (!first.ok()) return Expected<std::vector<std::string>, Diag>(first.error());
        path.push_back(first.value());
        while (is_punct(".")) {
            if (auto d = bump()) return Expected<std::vector<std::string>, Diag>(*d);
            auto part = expect_name("path component");
            if (!part.ok()) return Expected<std::vector<std::string>, Diag>(part.error());
            path.push_back(part.value());
        }
        return path;
    }

    Expr make_binary(BinOp op, Expr lhs, Expr rhs, int line, int col) {
        Expr e;
        e.line = line;
        e.col = col;
        Binary b;
        b.op = op;
        b.sub.push_back(std::move(lhs));
        b.sub.push_back(std::move(rhs));
        e.node = std::move(b);
        return e;
    }

    Lexer lex_;
    std::string file_;
    Token cur_;
};

}  // namespace

Expected<SpecModule, Diag> parse_spec(std::string_view source, const std::string& filename) {
    Parser p(source, filename);
    return p.parse_module();
}

Expected<Expr, Diag> parse_expr_text(std::string_view source) {
    Parser p(source, "<expr>");
    return p.parse_standalone_expr();
}

}  // namespace msgc
