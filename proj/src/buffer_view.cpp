#include "msgc/buffer_view.hpp"

namespace msgc {

const char* to_string(ByteOrder o) {
    return o == ByteOrder::Msbf ? "msbf" : "lsbf";
}

const char* to_string(ViewError e) {
    switch (e) {
        case ViewError::Overflow: return "overflow";
        case ViewError::Underflow: return "underflow";
        case ViewError::Domain: return "domain";
    }
    return "?";
}

namespace detail {

uint64_t read_bits(const uint8_t* data, int64_t head_bit, int width_bits) {
    uint64_t result = 0;
    int64_t pos = head_bit;
    int remaining = width_bits;
    while (remaining > 0) {
        int bit_in_byte = static_cast<int>(pos % 8);
        int take = 8 - bit_in_byte;
        if (take > remaining) take = remaining;
        int shift = 8 - bit_in_byte - take;
        uint8_t chunk = static_cast<uint8_t>((data[pos / 8] >> shift) & ((1u << take) - 1u));
        result = (result << take) | chunk;
        pos += take;
        remaining -= take;
    }
    return result;
}

void write_bits(uint8_t* data, int64_t head_bit, int width_bits, uint64_t value) {
    // Write most significant chunk first, mirroring read_bits.
    int64_t pos = head_bit;
    int remaining = width_bits;
    while (remaining > 0) {
        int bit_in_byte = static_cast<int>(pos % 8);
        int take = 8 - bit_in_byte;
        if (take > remaining) take = remaining;
        int shift = 8 - bit_in_byte - take;
        uint8_t mask = static_cast<uint8_t>(((1u << take) - 1u) << shift);
        uint8_t chunk = static_cast<uint8_t>((value >> (remaining - take)) & ((1u << take) - 1u));
        data[pos / 8] = static_cast<uint8_t>((data[pos / 8] & ~mask) | (chunk << shift));
        pos += take;
        remaining -= take;
    }
}

uint64_t byte_reverse(uint64_t value, int width_bits) {
    int n = width_bits / 8;
    uint64_t out = 0;
    for (int i = 0; i < n; ++i) {
        out = (out << 8) | (value & 0xFF);
        value >>= 8;
    }
    return out;
}

}  // namespace detail

Expected<MutableView, ViewError> MutableView::fill_zero(int64_t n) const {
    if (n < 0) return ViewError::Domain;
    if (n > available_bits()) return ViewError::Overflow;
    MutableView cur = *this;
    int64_t left = n;
    while (left > 0) {
        int chunk = left > 64 ? 64 : static_cast<int>(left);
        auto next = cur.put(0, chunk, ByteOrder::Msbf);
        if (!next.ok()) return next.error();
        cur = next.value();
        left -= chunk;
    }
    return cur;
}

}  // namespace msgc
