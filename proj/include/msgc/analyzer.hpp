#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "msgc/pcap.hpp"
#include "msgc/protocols.hpp"
#include "msgc/support.hpp"

namespace msgc {

/// One violating packet, attributed to the innermost layer that was reached.
/// klass separates semantic failures ("sem") from structural ones, and
/// structural failures on short captures ("trunc") from full ones ("struct").
struct Attribution {
    int64_t packet = 0;
    std::string protocol;
    std::string klass;
    std::string kind;  // overflow | underflow | invalid_variant | semantic
    std::string path;
    int64_t offset_bits = 0;
};

struct LayerRow {
    std::string protocol;
    int64_t count = 0;       // packets whose walk reached this layer
    int64_t classified = 0;  // packets whose walk ended at this layer
    int64_t structural = 0;
    int64_t semantic = 0;
    int64_t trunc = 0;
    std::map<std::string, int64_t> kinds;
    std::vector<Attribution> examples;
};

/// Per-row `classified` counts partition the classified packets, so the
/// rendered share column sums to at most 100%; packets matching no layer
/// are the unclassified remainder.
struct TraceReport {
    int64_t packets = 0;
    int64_t clean = 0;
    int64_t unclassified = 0;
    uint32_t link_type = kLinkEthernet;
    std::vector<LayerRow> rows;  // fixed order: eth, ipv4, ipv6, tcp, udp, openflow
    std::vector<Attribution> violations;  // sorted by packet index

    const LayerRow* row(const std::string& protocol) const;

    std::string to_text() const;
    std::string to_json() const;  // versioned, deterministic
};

struct AnalyzeOptions {
    int workers = 1;
    int max_examples = 3;
};

/// Replay every captured packet through the bundle's protocol stack and
/// count violations per layer. The walk follows Ethernet ethertype, the IP
/// protocol number, and the controller port 6633 for message streams.
Expected<TraceReport, std::string> analyze(const PcapFile& file, const Bundle& bundle,
                                           const AnalyzeOptions& opts = {});

}  // namespace msgc
