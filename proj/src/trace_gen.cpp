#include "msgc/trace_gen.hpp"

#include <algorithm>
#include <random>

#include <json.hpp>

namespace msgc {

namespace {

using Json = nlohmann::ordered_json;

struct Rng {
    std::mt19937_64 gen;

    explicit Rng(uint64_t seed) : gen(seed) {}

    uint64_t next() { return gen(); }
    /// Uniform-enough draw in [lo, hi]; bias is irrelevant here.
    int64_t range(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next() % static_cast<uint64_t>(hi - lo + 1));
    }
    uint8_t byte() { return static_cast<uint8_t>(next()); }
};

void put8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

void put16be(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put32be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v));
}

void put_random(std::vector<uint8_t>& out, Rng& rng, int64_t n) {
    for (int64_t i = 0; i < n; ++i) out.push_back(rng.byte());
}

void put_eth(std::vector<uint8_t>& out, Rng& rng, uint16_t ethertype) {
    put_random(out, rng, 12);
    put16be(out, ethertype);
}

/// Fixed part plus options. total_len covers everything after the Ethernet
/// header; the caller appends the payload itself.
void put_ipv4(std::vector<uint8_t>& out, Rng& rng, int ihl, uint16_t total_len, uint8_t proto) {
    put8(out, static_cast<uint8_t>(0x40 | (ihl & 0x0F)));
    put8(out, rng.byte());       // dscp/ecn
    put16be(out, total_len);
    put16be(out, static_cast<uint16_t>(rng.next()));  // ident
    put16be(out, 0x4000);        // don't-fragment, offset 0
    put8(out, static_cast<uint8_t>(rng.range(1, 255)));  // ttl
    put8(out, proto);
    put16be(out, static_cast<uint16_t>(rng.next()));  // checksum (not modeled)
    put32be(out, static_cast<uint32_t>(rng.next()));  // src
    put32be(out, static_cast<uint32_t>(rng.next()));  // dst
    if (ihl > 5) put_random(out, rng, (ihl - 5) * 4);
}

void put_ipv6(std::vector<uint8_t>& out, Rng& rng, uint16_t payload_len, uint8_t next_header) {
    uint32_t first = 0x60000000u | (static_cast<uint32_t>(rng.next()) & 0x0FFFFFFFu);
    put32be(out, first);  // version, traffic class, flow label
    put16be(out, payload_len);
    put8(out, next_header);
    put8(out, static_cast<uint8_t>(rng.range(1, 255)));  // hop limit
    put_random(out, rng, 32);                            // src + dst
}

uint16_t random_port(Rng& rng) {
    uint16_t p;
    do {
        p = static_cast<uint16_t>(rng.range(1024, 60000));
    } while (p == 6633);
    return p;
}

void put_tcp(std::vector<uint8_t>& out, Rng& rng, uint16_t sport, uint16_t dport, int doff) {
    put16be(out, sport);
    put16be(out, dport);
    put32be(out, static_cast<uint32_t>(rng.next()));  // seq
    put32be(out, static_cast<uint32_t>(rng.next()));  // ack
    put8(out, static_cast<uint8_t>((doff & 0x0F) << 4));
    put8(out, 0x18);  // psh+ack
    put16be(out, static_cast<uint16_t>(rng.range(1024, 65535)));  // window
    put16be(out, static_cast<uint16_t>(rng.next()));              // checksum
    put16be(out, 0);                                              // urgent
    if (doff > 5) put_random(out, rng, (doff - 5) * 4);
}

void put_udp(std::vector<uint8_t>& out, Rng& rng, uint16_t length) {
    put16be(out, random_port(rng));
    put16be(out, random_port(rng));
    put16be(out, length);
    put16be(out, static_cast<uint16_t>(rng.next()));  // checksum
}

void put_ofp_msg(std::vector<uint8_t>& out, Rng& rng, uint8_t version, int64_t payload) {
    put8(out, version);
    put8(out, static_cast<uint8_t>(rng.range(0, 3)));  // simple vector-payload types
    put16be(out, static_cast<uint16_t>(8 + payload));
    put32be(out, static_cast<uint32_t>(rng.next()));   // xid
    put_random(out, rng, payload);
}

enum class Shape { Ipv4, Ipv6, Tcp, Udp, Openflow };

struct Slot {
    Shape shape;
    bool inject = false;
};

struct Built {
    std::vector<uint8_t> bytes;
    std::string protocol;
    std::string kind;
    std::string path;
};

Built build_packet(const Slot& slot, Rng& rng) {
    Built b;
    std::vector<uint8_t>& out = b.bytes;
    switch (slot.shape) {
        case Shape::Ipv4: {
            int ihl = slot.inject ? static_cast<int>(rng.range(0, 4)) : 5;
            int64_t payload = rng.range(0, 32);
            put_eth(out, rng, 0x0800);
            put_ipv4(out, rng, ihl, static_cast<uint16_t>(20 + payload),
                     static_cast<uint8_t>(rng.range(0, 1) != 0 ? 1 : 253));
            put_random(out, rng, payload);
            if (slot.inject) {
                b.protocol = "ipv4";
                b.kind = "struct";
                b.path = "opts";
            }
            break;
        }
        case Shape::Ipv6: {
            int64_t payload = rng.range(0, 32);
            put_eth(out, rng, 0x86DD);
            put_ipv6(out, rng, static_cast<uint16_t>(payload), 253);
            put_random(out, rng, payload);
            break;
        }
        case Shape::Tcp: {
            int doff = slot.inject ? static_cast<int>(rng.range(0, 4)) : 5;
            int64_t payload = rng.range(0, 32);
            int hdr = slot.inject ? 20 : doff * 4;
            put_eth(out, rng, 0x0800);
            put_ipv4(out, rng, 5, static_cast<uint16_t>(20 + hdr + payload), 6);
            put_tcp(out, rng, random_port(rng), random_port(rng), doff);
            put_random(out, rng, payload);
            if (slot.inject) {
                b.protocol = "tcp";
                b.kind = "sem";
                b.path = "fixed.doff";
            }
            break;
        }
        case Shape::Udp: {
            int64_t payload = rng.range(0, 32);
            uint16_t length = slot.inject ? static_cast<uint16_t>(rng.range(0, 7))
                                          : static_cast<uint16_t>(8 + payload);
            put_eth(out, rng, 0x0800);
            put_ipv4(out, rng, 5, static_cast<uint16_t>(20 + 8 + payload), 17);
            put_udp(out, rng, length);
            put_random(out, rng, payload);
            if (slot.inject) {
                b.protocol = "udp";
                b.kind = "sem";
                b.path = "hdr.length";
            }
            break;
        }
        case Shape::Openflow: {
            std::vector<uint8_t> stream;
            int msgs = slot.inject ? 1 : static_cast<int>(rng.range(1, 3));
            for (int m = 0; m < msgs; ++m) {
                uint8_t version = 1;
                if (slot.inject) {
                    do {
                        version = rng.byte();
                    } while (version == 1);
                }
                put_ofp_msg(stream, rng, version, rng.range(0, 16));
            }
            bool to_controller = rng.range(0, 1) != 0;
            uint16_t sport = to_controller ? random_port(rng) : 6633;
            uint16_t dport = to_controller ? 6633 : random_port(rng);
            put_eth(out, rng, 0x0800);
            put_ipv4(out, rng, 5, static_cast<uint16_t>(20 + 20 + stream.size()), 6);
            put_tcp(out, rng, sport, dport, 5);
            out.insert(out.end(), stream.begin(), stream.end());
            if (slot.inject) {
                b.protocol = "openflow";
                b.kind = "sem";
                b.path = "[0].hdr.version";
            }
            break;
        }
    }
    return b;
}

int64_t clamp_count(int64_t declared, int64_t injected) {
    return std::max(declared, injected);
}

}  // namespace

Expected<GenPlan, std::string> parse_plan(const std::string& json_text) {
    Json doc = Json::parse(json_text, nullptr, /*allow_exceptions=*/false);
    if (doc.is_discarded()) return std::string("plan is not valid JSON");
    if (!doc.is_object()) return std::string("plan must be a JSON object");

    GenPlan plan;
    struct Key {
        const char* name;
        int64_t* dest;
    };
    int64_t seed_value = -1;
    const Key keys[] = {
        {"ipv4", &plan.ipv4},
        {"ipv6", &plan.ipv6},
        {"tcp", &plan.tcp},
        {"udp", &plan.udp},
        {"openflow", &plan.openflow},
        {"ihl_overflow", &plan.ihl_overflow},
        {"tcp_min_header", &plan.tcp_min_header},
        {"udp_min_header", &plan.udp_min_header},
        {"openflow_bad_version", &plan.openflow_bad_version},
        {"seed", &seed_value},
    };
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        const Key* match = nullptr;
        for (const auto& k : keys) {
            if (it.key() == k.name) match = &k;
        }
        if (match == nullptr) return "unknown plan key '" + it.key() + "'";
        if (!it.value().is_number_integer() || it.value().get<int64_t>() < 0) {
            return "plan key '" + it.key() + "' must be a non-negative integer";
        }
        *match->dest = it.value().get<int64_t>();
    }
    if (seed_value >= 0) plan.seed = static_cast<uint64_t>(seed_value);
    return plan;
}

GeneratedTrace generate_trace(const GenPlan& plan) {
    Rng rng(plan.seed);

    std::vector<Slot> slots;
    auto add = [&](Shape shape, int64_t declared, int64_t injected) {
        int64_t total = clamp_count(declared, injected);
        for (int64_t i = 0; i < total; ++i) slots.push_back({shape, i < injected});
    };
    add(Shape::Ipv4, plan.ipv4, plan.ihl_overflow);
    add(Shape::Ipv6, plan.ipv6, 0);
    add(Shape::Tcp, plan.tcp, plan.tcp_min_header);
    add(Shape::Udp, plan.udp, plan.udp_min_header);
    add(Shape::Openflow, plan.openflow, plan.openflow_bad_version);

    // Fisher-Yates with explicit draws so the order is identical everywhere.
    for (size_t i = slots.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.next() % i);
        std::swap(slots[i - 1], slots[j]);
    }

    GeneratedTrace trace;
    trace.pcap.link_type = kLinkEthernet;
    for (size_t i = 0; i < slots.size(); ++i) {
        Built b = build_packet(slots[i], rng);
        PcapRecord rec;
        rec.ts_sec = static_cast<uint32_t>(1700000000 + i);
        rec.ts_usec = static_cast<uint32_t>((i * 7919) % 1000000);
        rec.included_length = static_cast<uint32_t>(b.bytes.size());
        rec.original_length = rec.included_length;
        rec.bytes = std::move(b.bytes);
        trace.pcap.records.push_back(std::move(rec));
        if (!b.protocol.empty()) {
            trace.truth.push_back({static_cast<int64_t>(i), b.protocol, b.kind, b.path});
        }
    }
    return trace;
}

std::string truth_json(const GeneratedTrace& trace) {
    Json doc;
    doc["schema"] = 1;
    doc["packets"] = trace.pcap.records.size();
    Json list = Json::array();
    for (const auto& t : trace.truth) {
        Json e;
        e["packet"] = t.packet;
        e["protocol"] = t.protocol;
        e["kind"] = t.kind;
        e["path"] = t.path;
        list.push_back(std::move(e));
    }
    doc["violations"] = std::move(list);
    return doc.dump(2) + "\n";
}

}  // namespace msgc
