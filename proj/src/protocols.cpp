#include "msgc/protocols.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace msgc {

namespace {

const std::map<std::string, std::vector<std::string>>& bundle_table() {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"inet", {"inet.stv"}},
        {"openflow10", {"inet.stv", "openflow10.stv"}},
        {"openflow10_struct", {"openflow10_struct.stv"}},
    };
    return table;
}

Diag io_error(const std::string& path, const std::string& what) {
    Diag d;
    d.severity = Severity::Error;
    d.code = "P002";
    d.file = path;
    d.message = what;
    return d;
}

Diag invariant_error(const std::string& message) {
    Diag d;
    d.severity = Severity::Error;
    d.code = "I002";
    d.message = message;
    return d;
}

/// Fixed sizes the analyzer and generators rely on. A mismatch means the
/// bundled spec files were edited inconsistently.
struct SizePin {
    const char* bundle;
    const char* type;
    int64_t bits;
};

constexpr SizePin kSizePins[] = {
    {"inet", "EthHdr", 112},   {"inet", "Ipv4Fixed", 160},       {"inet", "Ipv6Fixed", 320},
    {"inet", "TcpFixed", 160}, {"inet", "UdpHdr", 64},           {"openflow10", "Hdr", 64},
    {"openflow10", "Match", 320}, {"openflow10_struct", "Hdr", 64},
};

std::optional<std::vector<Diag>> check_invariants(const Bundle& b) {
    std::vector<Diag> ds;
    for (const auto& pin : kSizePins) {
        if (b.name != pin.bundle && !(b.name == "openflow10" && std::string(pin.bundle) == "inet"))
            continue;
        auto size = constant_size_of(b.compiled.typed, pin.type);
        if (!size.ok()) {
            ds.push_back(invariant_error("bundle " + b.name + ": missing type " + pin.type));
            continue;
        }
        if (!size.value().has_value() || *size.value() != pin.bits)
            ds.push_back(invariant_error("bundle " + b.name + ": " + pin.type +
                                         " is not fixed at " + std::to_string(pin.bits) +
                                         " bits"));
    }
    // Every definition must serialize to whole bytes when its size is fixed;
    // the analyzer slices windows at byte granularity.
    for (const auto& name : b.compiled.typed.order) {
        const TypeInfo* info = b.compiled.typed.find_info(name);
        if (info->const_size_bits && *info->const_size_bits % 8 != 0)
            ds.push_back(invariant_error("bundle " + b.name + ": " + name +
                                         " has a fixed size that is not whole bytes"));
    }
    if (ds.empty()) return std::nullopt;
    return ds;
}

}  // namespace

std::vector<std::string> bundle_names() {
    std::vector<std::string> names;
    for (const auto& [name, files] : bundle_table()) names.push_back(name);
    return names;
}

const std::vector<std::string>* bundle_files(const std::string& name) {
    auto it = bundle_table().find(name);
    return it == bundle_table().end() ? nullptr : &it->second;
}

std::string default_specs_dir() { return MSGC_DEFAULT_SPECS_DIR; }

Expected<Bundle, std::vector<Diag>> load_bundle(const std::string& name,
                                                const std::string& specs_dir,
                                                const CompileOptions& opts) {
    const std::vector<std::string>* files = bundle_files(name);
    if (files == nullptr)
        return std::vector<Diag>{io_error(name, "unknown bundle '" + name + "'")};

    std::string dir = specs_dir.empty() ? MSGC_DEFAULT_SPECS_DIR : specs_dir;
    Bundle b;
    b.name = name;
    std::vector<SourceFile> sources;
    for (const auto& file : *files) {
        std::string path = dir + "/" + file;
        std::ifstream in(path, std::ios::binary);
        if (!in) return std::vector<Diag>{io_error(path, "cannot read spec file")};
        std::ostringstream text;
        text << in.rdbuf();
        sources.push_back(SourceFile{path, text.str()});
        b.files.push_back(path);
    }

    auto compiled = compile_sources(sources, opts);
    if (!compiled.ok()) return compiled.error();
    b.compiled = std::move(compiled).value();

    if (auto bad = check_invariants(b)) return *bad;
    return b;
}

const ParseValue* value_at(const ParseValue& root, const std::string& dotted_path) {
    const ParseValue* cur = &root;
    size_t start = 0;
    while (start <= dotted_path.size() && cur != nullptr) {
        size_t dot = dotted_path.find('.', start);
        std::string part = dotted_path.substr(
            start, dot == std::string::npos ? std::string::npos : dot - start);
        const auto* r = cur->as<RecordV>();
        cur = r != nullptr ? r->find(part) : nullptr;
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return cur;
}

std::optional<uint64_t> uint_at(const ParseValue& root, const std::string& dotted_path) {
    const ParseValue* v = value_at(root, dotted_path);
    const auto* u = v != nullptr ? v->as<UIntV>() : nullptr;
    if (u == nullptr) return std::nullopt;
    return u->value;
}

}  // namespace msgc
