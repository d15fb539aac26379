#include "msgc/pcap.hpp"

#include <fstream>
#include <sstream>

namespace msgc {

namespace {

constexpr uint32_t kMagic = 0xa1b2c3d4;
constexpr uint32_t kMagicSwapped = 0xd4c3b2a1;

uint32_t get32(const uint8_t* p, bool swap) {
    uint32_t v = static_cast<uint32_t>(p[0]) | static_cast<uint32_t>(p[1]) << 8 |
                 static_cast<uint32_t>(p[2]) << 16 | static_cast<uint32_t>(p[3]) << 24;
    if (swap) v = __builtin_bswap32(v);
    return v;
}

uint16_t get16(const uint8_t* p, bool swap) {
    uint16_t v = static_cast<uint16_t>(p[0] | p[1] << 8);
    if (swap) v = static_cast<uint16_t>(__builtin_bswap16(v));
    return v;
}

void put32(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v >> 16));
    out.push_back(static_cast<uint8_t>(v >> 24));
}

void put16(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

}  // namespace

Expected<PcapFile, std::string> parse_pcap(const std::vector<uint8_t>& raw) {
    if (raw.size() < 24) return std::string("corrupt capture: missing global header");
    uint32_t magic = get32(raw.data(), false);
    bool swap;
    if (magic == kMagic) {
        swap = false;
    } else if (magic == kMagicSwapped) {
        swap = true;
    } else {
        std::ostringstream msg;
        msg << "corrupt capture: bad magic 0x" << std::hex << magic;
        return msg.str();
    }
    uint16_t major = get16(raw.data() + 4, swap);
    if (major != 2) {
        return "unsupported capture version " + std::to_string(major);
    }

    PcapFile file;
    file.link_type = get32(raw.data() + 20, swap);

    size_t off = 24;
    size_t index = 0;
    while (off < raw.size()) {
        if (raw.size() - off < 16) {
            return "corrupt capture: truncated record header at packet " + std::to_string(index);
        }
        PcapRecord rec;
        rec.ts_sec = get32(raw.data() + off, swap);
        rec.ts_usec = get32(raw.data() + off + 4, swap);
        rec.included_length = get32(raw.data() + off + 8, swap);
        rec.original_length = get32(raw.data() + off + 12, swap);
        off += 16;
        if (rec.included_length > rec.original_length) {
            return "corrupt capture: packet " + std::to_string(index) +
                   " stores more bytes than were on the wire";
        }
        if (raw.size() - off < rec.included_length) {
            return "corrupt capture: truncated record body at packet " + std::to_string(index);
        }
        rec.bytes.assign(raw.begin() + static_cast<ptrdiff_t>(off),
                         raw.begin() + static_cast<ptrdiff_t>(off + rec.included_length));
        off += rec.included_length;
        file.records.push_back(std::move(rec));
        ++index;
    }
    return file;
}

Expected<PcapFile, std::string> read_pcap(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return "cannot open '" + path + "'";
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
    if (in.bad()) return "cannot read '" + path + "'";
    return parse_pcap(raw);
}

std::vector<uint8_t> serialize_pcap(const PcapFile& file) {
    std::vector<uint8_t> out;
    put32(out, kMagic);
    put16(out, 2);
    put16(out, 4);
    put32(out, 0);      // timezone offset
    put32(out, 0);      // timestamp accuracy
    put32(out, 65535);  // snap length
    put32(out, file.link_type);
    for (const auto& rec : file.records) {
        put32(out, rec.ts_sec);
        put32(out, rec.ts_usec);
        put32(out, static_cast<uint32_t>(rec.bytes.size()));
        put32(out, rec.original_length);
        out.insert(out.end(), rec.bytes.begin(), rec.bytes.end());
    }
    return out;
}

Expected<bool, std::string> write_pcap(const std::string& path, const PcapFile& file) {
    std::vector<uint8_t> raw = serialize_pcap(file);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return "cannot open '" + path + "' for writing";
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) return "cannot write '" + path + "'";
    return true;
}

std::optional<std::string> read_text_file(const std::string& path, std::string& error) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        error = "cannot open '" + path + "'";
        return std::nullopt;
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        error = "cannot read '" + path + "'";
        return std::nullopt;
    }
    return ss.str();
}

Expected<bool, std::string> write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) return "cannot open '" + path + "' for writing";
    out << text;
    if (!out) return "cannot write '" + path + "'";
    return true;
}

}  // namespace msgc
