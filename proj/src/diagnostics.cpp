#include "msgc/diagnostics.hpp"

#include <sstream>

namespace msgc {

std::string render(const Diag& d) {
    std::ostringstream out;
    out << (d.severity == Severity::Error ? "error" : "warning");
    if (!d.code.empty()) out << '[' << d.code << ']';
    out << ": ";
    if (!d.file.empty()) {
        out << d.file;
        if (d.line > 0) {
            out << ':' << d.line;
            if (d.col > 0) out << ':' << d.col;
        }
        out << ": ";
    } else if (d.line > 0) {
        out << "line " << d.line;
        if (d.col > 0) out << ':' << d.col;
        out << ": ";
    }
    out << d.message;
    return out.str();
}

std::string render(const std::vector<Diag>& ds) {
    std::ostringstream out;
    for (const auto& d : ds) out << render(d) << '\n';
    return out.str();
}

}  // namespace msgc
