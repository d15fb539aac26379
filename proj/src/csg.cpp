#include "msgc/csg.hpp"

#include <algorithm>

namespace msgc {

const char* to_string(NodeClass c) {
    switch (c) {
        case NodeClass::ConstantLeaf: return "constant_leaf";
        case NodeClass::ConstantComposite: return "constant_composite";
        case NodeClass::Dynamic: return "dynamic";
        case NodeClass::Loop: return "loop";
    }
    return "?";
}

const CsgNode* Csg::find(const std::string& label) const {
    for (const auto& n : nodes)
        if (n.label == label) return &n;
    return nullptr;
}

bool Csg::has_edge(const std::string& from, const std::string& to) const {
    return std::any_of(edges.begin(), edges.end(),
                       [&](const CsgEdge& e) { return e.from == from && e.to == to; });
}

std::string Csg::dump() const {
    std::string out;
    for (const auto& n : nodes) {
        out += n.label;
        out += " [";
        out += to_string(n.cls);
        out += "]\n";
    }
    for (const auto& e : edges) {
        out += e.from;
        out += " -> ";
        out += e.to;
        out += "\n";
    }
    return out;
}

namespace {

struct Builder {
    const TypedModule& typed;
    const ModuleIR& mod;
    Csg out;

    bool body_calls(const InstrList& body) const {
        for (const auto& in : body) {
            if (in.is<CallInstr>()) return true;
            if (auto* lp = in.as<LoopInstr>()) {
                if (body_calls(lp->body)) return true;
            } else if (auto* rp = in.as<RepeatInstr>()) {
                if (body_calls(rp->body)) return true;
            } else if (auto* d = in.as<DispatchInstr>()) {
                for (const auto& a : d->arms)
                    if (body_calls(a)) return true;
            }
        }
        return false;
    }

    // Emit edges from `from`; loops become their own nodes so that per-element
    // call context stays visible to the optimizer and to dump readers.
    void edges_from(const std::string& from, const InstrList& body, int& loop_ordinal) {
        for (const auto& in : body) {
            if (auto* call = in.as<CallInstr>()) {
                out.edges.push_back(
                    {from, op_label(call->type_name, call->op, call->unguarded)});
            } else if (auto* lp = in.as<LoopInstr>()) {
                std::string label = from + "/loop" + std::to_string(loop_ordinal++);
                out.nodes.push_back({label, NodeClass::Loop});
                out.edges.push_back({from, label});
                int inner = 0;
                edges_from(label, lp->body, inner);
            } else if (auto* rp = in.as<RepeatInstr>()) {
                edges_from(from, rp->body, loop_ordinal);
            } else if (auto* d = in.as<DispatchInstr>()) {
                for (const auto& a : d->arms) edges_from(from, a, loop_ordinal);
            }
        }
    }

    Csg run() {
        for (const auto& op : mod.ops) {
            const TypeInfo* info = typed.find_info(op.type_name);
            NodeClass cls;
            if (info != nullptr && info->const_size_bits.has_value())
                cls = body_calls(op.body) ? NodeClass::ConstantComposite : NodeClass::ConstantLeaf;
            else
                cls = NodeClass::Dynamic;
            out.nodes.push_back({op_label(op), cls});
        }
        for (const auto& op : mod.ops) {
            int loop_ordinal = 0;
            edges_from(op_label(op), op.body, loop_ordinal);
        }
        return std::move(out);
    }
};

}  // namespace

Csg build_csg(const TypedModule& typed, const ModuleIR& mod) {
    return Builder{typed, mod, {}}.run();
}

}  // namespace msgc
