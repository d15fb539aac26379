#include "msgc/support.hpp"

#include <algorithm>

namespace msgc {

std::string int128_to_string(Int128 v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    // Negate digit-by-digit to survive INT128_MIN.
    std::string out;
    unsigned __int128 u = neg ? ~static_cast<unsigned __int128>(v) + 1 : static_cast<unsigned __int128>(v);
    while (u > 0) {
        out.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) out.push_back('-');
    std::reverse(out.begin(), out.end());
    return out;
}

std::optional<Int128> checked_add(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
    return r;
}

std::optional<Int128> checked_sub(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
    return r;
}

std::optional<Int128> checked_mul(Int128 a, Int128 b) {
    Int128 r;
    if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
    return r;
}

std::optional<Int128> checked_div(Int128 a, Int128 b) {
    if (b == 0) return std::nullopt;
    Int128 min = Int128(1);
    min <<= 127;  // INT128_MIN
    if (a == min && b == -1) return std::nullopt;
    return a / b;
}

}  // namespace msgc
