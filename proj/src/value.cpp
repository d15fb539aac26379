#include "msgc/value.hpp"

namespace msgc {

ParseValue* RecordV::find(const std::string& name) {
    for (auto& [n, v] : fields)
        if (n == name) return &v;
    return nullptr;
}

const ParseValue* RecordV::find(const std::string& name) const {
    for (const auto& [n, v] : fields)
        if (n == name) return &v;
    return nullptr;
}

ParseValue make_uint(uint64_t value, int width_bits) {
    ParseValue v;
    v.node = UIntV{value, width_bits};
    return v;
}

ParseValue make_record() {
    ParseValue v;
    v.node = RecordV{};
    return v;
}

ParseValue make_array() {
    ParseValue v;
    v.node = ArrayV{};
    return v;
}

ParseValue make_vector() {
    ParseValue v;
    v.node = VectorV{};
    return v;
}

ParseValue make_variant(std::string arm_name, int arm_index, ParseValue inner) {
    ParseValue v;
    VariantV var;
    var.arm_name = std::move(arm_name);
    var.arm_index = arm_index;
    var.inner.push_back(std::move(inner));
    v.node = std::move(var);
    return v;
}

bool equal_values(const ParseValue& a, const ParseValue& b) {
    if (a.node.index() != b.node.index()) return false;
    if (auto* ua = a.as<UIntV>()) {
        auto* ub = b.as<UIntV>();
        return ua->value == ub->value && ua->width_bits == ub->width_bits;
    }
    auto all_equal = [](const std::vector<ParseValue>& xs, const std::vector<ParseValue>& ys) {
        if (xs.size() != ys.size()) return false;
        for (size_t i = 0; i < xs.size(); ++i)
            if (!equal_values(xs[i], ys[i])) return false;
        return true;
    };
    if (auto* aa = a.as<ArrayV>()) return all_equal(aa->elems, b.as<ArrayV>()->elems);
    if (auto* va = a.as<VectorV>()) return all_equal(va->elems, b.as<VectorV>()->elems);
    if (auto* ra = a.as<RecordV>()) {
        auto* rb = b.as<RecordV>();
        if (ra->fields.size() != rb->fields.size()) return false;
        for (size_t i = 0; i < ra->fields.size(); ++i) {
            if (ra->fields[i].first != rb->fields[i].first) return false;
            if (!equal_values(ra->fields[i].second, rb->fields[i].second)) return false;
        }
        return true;
    }
    if (auto* xa = a.as<VariantV>()) {
        auto* xb = b.as<VariantV>();
        return xa->arm_name == xb->arm_name && all_equal(xa->inner, xb->inner);
    }
    return true;  // both monostate
}

int64_t value_bits(const ParseValue& v) {
    if (auto* u = v.as<UIntV>()) return u->width_bits;
    if (auto* a = v.as<ArrayV>()) {
        int64_t n = 0;
        for (const auto& e : a->elems) n += value_bits(e);
        return n;
    }
    if (auto* vec = v.as<VectorV>()) {
        int64_t n = 0;
        for (const auto& e : vec->elems) n += value_bits(e);
        return n;
    }
    if (auto* r = v.as<RecordV>()) {
        int64_t n = 0;
        for (const auto& [name, f] : r->fields) n += value_bits(f);
        return n;
    }
    if (auto* x = v.as<VariantV>()) return x->inner.empty() ? 0 : value_bits(x->inner[0]);
    return 0;
}

namespace {

void render_to(const ParseValue& v, std::string& out) {
    if (auto* u = v.as<UIntV>()) {
        out += std::to_string(u->value);
        return;
    }
    auto render_list = [&out](const std::vector<ParseValue>& elems) {
        out += '[';
        for (size_t i = 0; i < elems.size(); ++i) {
            if (i) out += ',';
            render_to(elems[i], out);
        }
        out += ']';
    };
    if (auto* a = v.as<ArrayV>()) {
        render_list(a->elems);
        return;
    }
    if (auto* vec = v.as<VectorV>()) {
        render_list(vec->elems);
        return;
    }
    if (auto* r = v.as<RecordV>()) {
        out += '{';
        for (size_t i = 0; i < r->fields.size(); ++i) {
            if (i) out += ',';
            out += '"';
            out += r->fields[i].first;
            out += "\":";
            render_to(r->fields[i].second, out);
        }
        out += '}';
        return;
    }
    if (auto* x = v.as<VariantV>()) {
        out += "{\"arm\":\"";
        out += x->arm_name;
        out += "\",\"value\":";
        if (x->inner.empty())
            out += "null";
        else
            render_to(x->inner[0], out);
        out += '}';
        return;
    }
    out += "null";
}

}  // namespace

std::string render(const ParseValue& v) {
    std::string out;
    render_to(v, out);
    return out;
}

}  // namespace msgc
