#pragma once

#include <string>
#include <vector>

#include "msgc/ir.hpp"
#include "msgc/typecheck.hpp"

namespace msgc {

/// Classification of a call sequence graph node. Constant nodes have an
/// input-independent serialized size; leaves make no calls. Loop nodes are
/// synthetic: one per greedy element loop, owning the calls made per element.
enum class NodeClass { ConstantLeaf, ConstantComposite, Dynamic, Loop };

const char* to_string(NodeClass c);

struct CsgNode {
    std::string label;
    NodeClass cls = NodeClass::Dynamic;
};

struct CsgEdge {
    std::string from;
    std::string to;
};

/// Call sequence graph: one node per operation (plus loop nodes), one edge
/// per call site. Acyclic because definitions resolve in declaration order.
struct Csg {
    std::vector<CsgNode> nodes;
    std::vector<CsgEdge> edges;

    const CsgNode* find(const std::string& label) const;
    bool has_edge(const std::string& from, const std::string& to) const;
    std::string dump() const;  // node per line, then `A -> B` edges
};

Csg build_csg(const TypedModule& typed, const ModuleIR& mod);

}  // namespace msgc
