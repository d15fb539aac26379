#pragma once

#include <string>
#include <vector>

#include "msgc/compile.hpp"
#include "msgc/engine.hpp"

namespace msgc {

/// A named set of spec files compiled together.
struct Bundle {
    std::string name;
    std::vector<std::string> files;  // absolute paths of the sources used
    CompiledModule compiled;
};

std::vector<std::string> bundle_names();

/// The specs directory this build was configured with.
std::string default_specs_dir();

/// Spec file names (relative to the specs directory) making up a bundle, or
/// nullptr for an unknown bundle name.
const std::vector<std::string>* bundle_files(const std::string& name);

/// Load and compile a bundle. An empty specs_dir uses the directory this
/// build was configured with. Load-time invariants (fixed header sizes, byte
/// alignment of every definition) are re-checked here.
Expected<Bundle, std::vector<Diag>> load_bundle(const std::string& name,
                                                const std::string& specs_dir = "",
                                                const CompileOptions& opts = {});

/// Convenience lookups over parsed values used by the trace analyzer.
const ParseValue* value_at(const ParseValue& root, const std::string& dotted_path);
std::optional<uint64_t> uint_at(const ParseValue& root, const std::string& dotted_path);

}  // namespace msgc
