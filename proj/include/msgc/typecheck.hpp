#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msgc/ast.hpp"
#include "msgc/diagnostics.hpp"
#include "msgc/support.hpp"

namespace msgc {

/// Per-definition metadata computed by typecheck.
struct TypeInfo {
    std::string name;
    std::vector<ParamDecl> params;
    /// Serialized size in bits when the type occupies a fixed amount of the
    /// stream, independent of field values. Vectors and variants never do.
    std::optional<int64_t> const_size_bits;
    /// Ordered external references: the parameters the type depends on.
    std::vector<std::string> dependencies;
};

/// Typechecked module: the annotated AST plus per-type metadata. Field
/// references inside expressions carry their resolved kind (field vs param).
struct TypedModule {
    SpecModule module;
    std::vector<std::string> order;  // definition order of type names
    std::map<std::string, TypeInfo> info;
    std::vector<Diag> warnings;

    const TypeDef* find_type(const std::string& name) const { return module.find_type(name); }
    const PredDef* find_pred(const std::string& name) const { return module.find_pred(name); }
    const TypeInfo* find_info(const std::string& name) const {
        auto it = info.find(name);
        return it == info.end() ? nullptr : &it->second;
    }
};

Expected<TypedModule, std::vector<Diag>> typecheck(const SpecModule& parsed);

/// Fixed size of a named type in bits, or nullopt for value-dependent types.
/// Unknown names produce an error diagnostic.
Expected<std::optional<int64_t>, Diag> constant_size_of(const TypedModule& typed,
                                                        const std::string& type_name);

/// Constant size of an inline type expression in the context of a module.
std::optional<int64_t> const_size_bits_of(const TypedModule& typed, const TypeExpr& t);

/// Fold an expression to a constant. bytes(path) folds when the referenced
/// field has a constant size; field and parameter references never fold.
/// `scope_fields` provides the visible record fields for bytes() resolution.
std::optional<Int128> const_fold(const TypedModule& typed, const std::vector<Decl>& scope_fields,
                                 const Expr& e);

}  // namespace msgc
