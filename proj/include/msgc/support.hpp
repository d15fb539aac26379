#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace msgc {

// Expression arithmetic is signed 128-bit so that products and differences of
// 64-bit field values cannot wrap silently.
using Int128 = __int128;

std::string int128_to_string(Int128 v);

// Checked arithmetic: nullopt on overflow or division by zero. Callers decide
// how an evaluation failure is classified.
std::optional<Int128> checked_add(Int128 a, Int128 b);
std::optional<Int128> checked_sub(Int128 a, Int128 b);
std::optional<Int128> checked_mul(Int128 a, Int128 b);
std::optional<Int128> checked_div(Int128 a, Int128 b);

// Minimal expected-or-error holder. Error type must differ from value type.
template <typename T, typename E>
class Expected {
public:
    Expected(T value) : v_(std::in_place_index<0>, std::move(value)) {}
    Expected(E error) : v_(std::in_place_index<1>, std::move(error)) {}

    bool ok() const { return v_.index() == 0; }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<0>(v_); }
    T& value() & { return std::get<0>(v_); }
    T&& value() && { return std::get<0>(std::move(v_)); }
    const E& error() const& { return std::get<1>(v_); }
    E& error() & { return std::get<1>(v_); }

    const T& operator*() const& { return value(); }
    const T* operator->() const { return &value(); }

private:
    std::variant<T, E> v_;
};

}  // namespace msgc
