#include "msgc/analyzer.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "msgc/engine.hpp"

namespace msgc {

namespace {

using Json = nlohmann::ordered_json;

constexpr int kEth = 0;
constexpr int kIpv4 = 1;
constexpr int kIpv6 = 2;
constexpr int kTcp = 3;
constexpr int kUdp = 4;
constexpr int kOpenflow = 5;
constexpr int kRowCount = 6;

const char* row_name(int layer) {
    static const char* names[kRowCount] = {"eth", "ipv4", "ipv6", "tcp", "udp", "openflow"};
    return names[layer];
}

const char* kind_slug(FailKind k) {
    switch (k) {
        case FailKind::Overflow: return "overflow";
        case FailKind::Underflow: return "underflow";
        case FailKind::InvalidVariant: return "invalid_variant";
        case FailKind::Semantic: return "semantic";
    }
    return "unknown";
}

constexpr uint16_t kControllerPort = 6633;

struct PacketOutcome {
    bool reached[kRowCount] = {false, false, false, false, false, false};
    int deepest = -1;
    bool violated = false;
    Attribution violation;
};

/// Walks one packet through the layered stack. Sub-layers get sub-windows of
/// the one packet buffer, so every violation offset is absolute in the packet.
class Walker {
public:
    explicit Walker(const Bundle& bundle)
        : bundle_(bundle),
          lenient_(bundle.compiled.typed, bundle.compiled.ir),
          strict_(bundle.compiled.typed, bundle.compiled.ir, strict_options()) {}

    PacketOutcome walk(const PcapRecord& rec, uint32_t link_type) {
        PacketOutcome out;
        Buffer buf(rec.bytes);
        bool short_capture = rec.included_length < rec.original_length;

        auto reach = [&](int layer) {
            out.reached[layer] = true;
            out.deepest = layer;
        };
        auto attribute = [&](int layer, FailKind kind, const std::string& path,
                             int64_t offset_bits, const std::string&) {
            out.violated = true;
            out.violation.protocol = row_name(layer);
            out.violation.kind = kind_slug(kind);
            out.violation.klass =
                kind == FailKind::Semantic ? "sem" : (short_capture ? "trunc" : "struct");
            out.violation.path = path;
            out.violation.offset_bits = offset_bits;
        };
        auto attribute_violation = [&](int layer, const Violation& v) {
            attribute(layer, v.kind, v.path, v.offset_bits, v.detail);
        };

        int64_t l3_off_bits = 0;
        bool is_v4 = false;
        bool is_v6 = false;

        if (link_type == kLinkEthernet) {
            if (!has("EthHdr")) return out;
            auto eth = lenient_.from_view("EthHdr", View(buf));
            reach(kEth);
            if (!eth.ok()) {
                attribute_violation(kEth, *eth.violation);
                return out;
            }
            uint64_t ethertype = uint_at(*eth.value, "ethertype").value_or(0);
            l3_off_bits = 14 * 8;
            is_v4 = ethertype == 0x0800;
            is_v6 = ethertype == 0x86DD;
        } else {
            if (rec.bytes.empty()) return out;
            int version = rec.bytes[0] >> 4;
            is_v4 = version == 4;
            is_v6 = version == 6;
        }
        if (!is_v4 && !is_v6) return out;

        auto l3 = View(buf).advance(l3_off_bits);
        if (!l3.ok()) return out;

        uint8_t proto = 0;
        int64_t l4_start_bits = 0;
        int64_t l4_end_bits = 0;

        if (is_v4) {
            if (!has("Ipv4")) return out;
            reach(kIpv4);
            auto ip = lenient_.from_view("Ipv4", l3.value());
            if (!ip.ok()) {
                attribute_violation(kIpv4, *ip.violation);
                return out;
            }
            int64_t hdr_len = static_cast<int64_t>(uint_at(*ip.value, "fixed.ihl").value_or(0)) * 4;
            int64_t total_len = static_cast<int64_t>(
                uint_at(*ip.value, "fixed.total_len").value_or(0));
            proto = static_cast<uint8_t>(uint_at(*ip.value, "fixed.proto").value_or(0));
            if (total_len < hdr_len) {
                attribute(kIpv4, FailKind::Underflow, "fixed.total_len",
                          l3_off_bits + ip.consumed_bits, "");
                return out;
            }
            l4_start_bits = l3_off_bits + hdr_len * 8;
            l4_end_bits = std::min(l3_off_bits + total_len * 8, buf.size_bits());
        } else {
            if (!has("Ipv6Fixed")) return out;
            reach(kIpv6);
            auto ip = lenient_.from_view("Ipv6Fixed", l3.value());
            if (!ip.ok()) {
                attribute_violation(kIpv6, *ip.violation);
                return out;
            }
            int64_t payload_len = static_cast<int64_t>(
                uint_at(*ip.value, "payload_len").value_or(0));
            proto = static_cast<uint8_t>(uint_at(*ip.value, "next_header").value_or(0));
            l4_start_bits = l3_off_bits + 40 * 8;
            l4_end_bits = std::min(l4_start_bits + payload_len * 8, buf.size_bits());
        }
        if (proto != 6 && proto != 17) return out;

        auto l4 = View(buf).advance(l4_start_bits);
        if (!l4.ok()) return out;
        auto window = l4.value().constrain(std::max<int64_t>(l4_end_bits - l4_start_bits, 0));
        if (!window.ok()) return out;

        if (proto == 17) {
            if (!has("Udp")) return out;
            reach(kUdp);
            auto udp = lenient_.from_view("Udp", window.value());
            if (!udp.ok()) attribute_violation(kUdp, *udp.violation);
            return out;
        }

        if (!has("Tcp")) return out;
        reach(kTcp);
        auto tcp = lenient_.from_view("Tcp", window.value());
        if (!tcp.ok()) {
            attribute_violation(kTcp, *tcp.violation);
            return out;
        }
        uint64_t sport = uint_at(*tcp.value, "fixed.sport").value_or(0);
        uint64_t dport = uint_at(*tcp.value, "fixed.dport").value_or(0);
        if (sport != kControllerPort && dport != kControllerPort) return out;
        if (!has("MsgStream")) return out;

        auto payload = window.value().advance(tcp.consumed_bits);
        if (!payload.ok() || payload.value().available_bits() == 0) return out;
        reach(kOpenflow);
        auto stream = strict_.from_view("MsgStream", payload.value());
        if (!stream.ok()) attribute_violation(kOpenflow, *stream.violation);
        return out;
    }

private:
    static ExecOptions strict_options() {
        ExecOptions o;
        o.strict_vectors = true;
        return o;
    }

    bool has(const std::string& type) const {
        return bundle_.compiled.typed.find_type(type) != nullptr;
    }

    const Bundle& bundle_;
    Engine lenient_;
    Engine strict_;
};

}  // namespace

const LayerRow* TraceReport::row(const std::string& protocol) const {
    for (const auto& r : rows) {
        if (r.protocol == protocol) return &r;
    }
    return nullptr;
}

Expected<TraceReport, std::string> analyze(const PcapFile& file, const Bundle& bundle,
                                           const AnalyzeOptions& opts) {
    if (file.link_type != kLinkEthernet && file.link_type != kLinkRawIp) {
        return "unsupported link type " + std::to_string(file.link_type);
    }

    size_t n = file.records.size();
    int workers = std::max(1, std::min(opts.workers, 64));
    if (static_cast<size_t>(workers) > n && n > 0) workers = static_cast<int>(n);

    std::vector<PacketOutcome> outcomes(n);
    auto run = [&](int w) {
        Walker walker(bundle);
        for (size_t i = static_cast<size_t>(w); i < n; i += static_cast<size_t>(workers)) {
            outcomes[i] = walker.walk(file.records[i], file.link_type);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
        for (auto& t : pool) t.join();
    }

    TraceReport report;
    report.packets = static_cast<int64_t>(n);
    report.link_type = file.link_type;
    report.rows.resize(kRowCount);
    for (int r = 0; r < kRowCount; ++r) report.rows[r].protocol = row_name(r);

    for (size_t i = 0; i < n; ++i) {
        const PacketOutcome& out = outcomes[i];
        for (int r = 0; r < kRowCount; ++r) {
            if (out.reached[r]) ++report.rows[static_cast<size_t>(r)].count;
        }
        if (out.deepest >= 0) {
            ++report.rows[static_cast<size_t>(out.deepest)].classified;
        } else {
            ++report.unclassified;
        }
        if (!out.violated) {
            ++report.clean;
            continue;
        }
        Attribution a = out.violation;
        a.packet = static_cast<int64_t>(i);
        for (auto& row : report.rows) {
            if (row.protocol != a.protocol) continue;
            if (a.klass == "sem") ++row.semantic;
            if (a.klass == "struct") ++row.structural;
            if (a.klass == "trunc") ++row.trunc;
            ++row.kinds[a.kind];
            if (static_cast<int>(row.examples.size()) < opts.max_examples) {
                row.examples.push_back(a);
            }
        }
        report.violations.push_back(std::move(a));
    }
    return report;
}

std::string TraceReport::to_text() const {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-10s %8s %9s %8s %8s %8s\n", "protocol", "count", "cdf",
                  "struct", "sem", "trunc");
    out << line;
    for (const auto& r : rows) {
        double cdf = packets > 0 ? 100.0 * static_cast<double>(r.classified) /
                                       static_cast<double>(packets)
                                 : 0.0;
        std::snprintf(line, sizeof(line), "%-10s %8lld %8.2f%% %8lld %8lld %8lld\n",
                      r.protocol.c_str(), static_cast<long long>(r.count), cdf,
                      static_cast<long long>(r.structural), static_cast<long long>(r.semantic),
                      static_cast<long long>(r.trunc));
        out << line;
    }
    for (const auto& r : rows) {
        if (r.kinds.empty()) continue;
        out << r.protocol << ":";
        for (const auto& [kind, count] : r.kinds) out << " " << kind << " " << count;
        for (const auto& e : r.examples) {
            out << "  (e.g. #" << e.packet << " @bit " << e.offset_bits;
            if (!e.path.empty()) out << " " << e.path;
            out << ")";
        }
        out << "\n";
    }
    out << "packets " << packets << ", clean " << clean << ", violating "
        << violations.size() << ", unclassified " << unclassified << "\n";
    return out.str();
}

std::string TraceReport::to_json() const {
    Json doc;
    doc["schema"] = 1;
    doc["packets"] = packets;
    doc["clean"] = clean;
    doc["unclassified"] = unclassified;
    doc["link_type"] = link_type;
    Json jrows = Json::array();
    for (const auto& r : rows) {
        Json jr;
        jr["protocol"] = r.protocol;
        jr["count"] = r.count;
        jr["classified"] = r.classified;
        char cdf[16];
        std::snprintf(cdf, sizeof(cdf), "%.2f",
                      packets > 0 ? 100.0 * static_cast<double>(r.classified) /
                                        static_cast<double>(packets)
                                  : 0.0);
        jr["cdf"] = cdf;
        jr["struct"] = r.structural;
        jr["sem"] = r.semantic;
        jr["trunc"] = r.trunc;
        Json kinds = Json::object();
        for (const auto& [kind, count] : r.kinds) kinds[kind] = count;
        jr["kinds"] = std::move(kinds);
        Json examples = Json::array();
        for (const auto& e : r.examples) {
            Json je;
            je["packet"] = e.packet;
            je["kind"] = e.kind;
            je["path"] = e.path;
            je["offset_bits"] = e.offset_bits;
            examples.push_back(std::move(je));
        }
        jr["examples"] = std::move(examples);
        jrows.push_back(std::move(jr));
    }
    doc["rows"] = std::move(jrows);
    Json jviol = Json::array();
    for (const auto& v : violations) {
        Json jv;
        jv["packet"] = v.packet;
        jv["protocol"] = v.protocol;
        jv["klass"] = v.klass;
        jv["kind"] = v.kind;
        jv["path"] = v.path;
        jv["offset_bits"] = v.offset_bits;
        jviol.push_back(std::move(jv));
    }
    doc["violations"] = std::move(jviol);
    return doc.dump(2) + "\n";
}

}  // namespace msgc
