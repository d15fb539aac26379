#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msgc/support.hpp"

namespace msgc {

/// One captured packet. included_length is the byte count actually stored;
/// original_length is the size on the wire. included never exceeds original.
struct PcapRecord {
    uint32_t ts_sec = 0;
    uint32_t ts_usec = 0;
    uint32_t included_length = 0;
    uint32_t original_length = 0;
    std::vector<uint8_t> bytes;
};

constexpr uint32_t kLinkEthernet = 1;
constexpr uint32_t kLinkRawIp = 101;

struct PcapFile {
    uint32_t link_type = kLinkEthernet;
    std::vector<PcapRecord> records;
};

/// Classic capture format only: 0xa1b2c3d4 magic (either byte order),
/// 24-byte global header, 16-byte record headers.
Expected<PcapFile, std::string> parse_pcap(const std::vector<uint8_t>& raw);
Expected<PcapFile, std::string> read_pcap(const std::string& path);

/// Serializes little-endian with microsecond timestamps, version 2.4.
std::vector<uint8_t> serialize_pcap(const PcapFile& file);
Expected<bool, std::string> write_pcap(const std::string& path, const PcapFile& file);

/// Whole-file helpers. On failure `error` holds the reason.
std::optional<std::string> read_text_file(const std::string& path, std::string& error);
Expected<bool, std::string> write_text_file(const std::string& path, const std::string& text);

}  // namespace msgc
