#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msgc/pcap.hpp"
#include "msgc/support.hpp"

namespace msgc {

/// Corpus recipe. Protocol keys give the minimum packet count for that
/// protocol; injection keys force that many of those packets to carry the
/// named violation. A protocol's final count is the larger of its declared
/// count and the sum of its injections.
struct GenPlan {
    int64_t ipv4 = 0;
    int64_t ipv6 = 0;
    int64_t tcp = 0;
    int64_t udp = 0;
    int64_t openflow = 0;

    int64_t ihl_overflow = 0;          // ipv4: header length below the fixed part
    int64_t tcp_min_header = 0;        // tcp: data offset below five words
    int64_t udp_min_header = 0;        // udp: length below the header size
    int64_t openflow_bad_version = 0;  // openflow: version outside the domain

    uint64_t seed = 1;
};

/// Flat JSON object, e.g. {"ipv4":100,"ihl_overflow":5,"seed":7}.
/// Unknown keys are rejected.
Expected<GenPlan, std::string> parse_plan(const std::string& json_text);

/// One injected violation, recorded at generation time.
struct TruthEntry {
    int64_t packet = 0;
    std::string protocol;
    std::string kind;  // "struct" or "sem"
    std::string path;
};

struct GeneratedTrace {
    PcapFile pcap;
    std::vector<TruthEntry> truth;
};

/// Deterministic for a fixed plan (including seed).
GeneratedTrace generate_trace(const GenPlan& plan);

/// Sidecar ground-truth document for a generated trace.
std::string truth_json(const GeneratedTrace& trace);

}  // namespace msgc
