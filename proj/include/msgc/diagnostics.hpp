#pragma once

#include <string>
#include <vector>

namespace msgc {

enum class Severity { Error, Warning };

/// Compiler-style diagnostic. `code` namespaces the source: Pxxx parser,
/// Txxx typecheck, Sxxx safety verifier, Ixxx internal.
struct Diag {
    Severity severity = Severity::Error;
    std::string code;
    std::string file;
    int line = 0;
    int col = 0;
    std::string message;

    bool operator==(const Diag&) const = default;
};

std::string render(const Diag& d);
std::string render(const std::vector<Diag>& ds);

}  // namespace msgc
