#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "msgc/support.hpp"

namespace msgc {

enum class ByteOrder : uint8_t { Msbf, Lsbf };

const char* to_string(ByteOrder o);

/// Failure classes for view operations.
///   Overflow:  an access or advance past the end of the window.
///   Underflow: a constrain request larger than the window (or negative).
///   Domain:    argument outside the operation's domain (bad width, value too
///              wide for put, lsbf on a non-whole-byte width, negative bits).
enum class ViewError : uint8_t { Overflow, Underflow, Domain };

const char* to_string(ViewError e);

/// Immutable byte storage, cheap to copy and safe to share across threads.
class Buffer {
public:
    Buffer() : data_(std::make_shared<const std::vector<uint8_t>>()) {}
    explicit Buffer(std::vector<uint8_t> bytes)
        : data_(std::make_shared<const std::vector<uint8_t>>(std::move(bytes))) {}

    int64_t size_bytes() const { return static_cast<int64_t>(data_->size()); }
    int64_t size_bits() const { return size_bytes() * 8; }
    const uint8_t* data() const { return data_->data(); }
    const std::vector<uint8_t>& bytes() const { return *data_; }

private:
    std::shared_ptr<const std::vector<uint8_t>> data_;
};

/// Fixed-size writable storage, zero-initialized. freeze() releases the bytes
/// into an immutable Buffer; the MutableBuffer must not be written afterwards.
class MutableBuffer {
public:
    explicit MutableBuffer(size_t size_bytes)
        : data_(std::make_shared<std::vector<uint8_t>>(size_bytes, 0)) {}

    int64_t size_bytes() const { return static_cast<int64_t>(data_->size()); }
    int64_t size_bits() const { return size_bytes() * 8; }
    // Mutability follows the shared storage, not the handle.
    uint8_t* data() const { return data_->data(); }

    Buffer freeze() const { return Buffer(*data_); }

private:
    std::shared_ptr<std::vector<uint8_t>> data_;
};

/// Result of a successful get: the decoded value and the advanced view.
template <typename ViewT>
struct GetResult {
    uint64_t value;
    ViewT rest;
};

namespace detail {

// Bit-granular accessors over raw storage. Bit 0 is the MSB of byte 0; a field
// read of width w takes the next w bits in stream order, most significant
// first. For whole-byte widths ByteOrder::Lsbf reverses the byte sequence.
uint64_t read_bits(const uint8_t* data, int64_t head_bit, int width_bits);
void write_bits(uint8_t* data, int64_t head_bit, int width_bits, uint64_t value);
uint64_t byte_reverse(uint64_t value, int width_bits);

// Shared window algebra for View/MutableView. Head/tail are absolute bit
// positions into the storage; invariant 0 <= head <= tail <= storage bits.
template <typename Derived>
class WindowOps {
public:
    int64_t head_bits() const { return self().head_; }
    int64_t tail_bits() const { return self().tail_; }
    int64_t available_bits() const { return self().tail_ - self().head_; }
    int64_t available_bytes() const { return available_bits() / 8; }

    /// Consume n bits from the front. Overflow if n exceeds the window.
    Expected<Derived, ViewError> advance(int64_t n) const {
        if (n < 0) return ViewError::Domain;
        if (n > available_bits()) return ViewError::Overflow;
        Derived out = self();
        out.head_ += n;
        return out;
    }

    /// Narrow the window to exactly its first n bits. Underflow if the window
    /// holds fewer than n bits or n is negative.
    Expected<Derived, ViewError> constrain(int64_t n) const {
        if (n < 0) return ViewError::Underflow;
        if (n > available_bits()) return ViewError::Underflow;
        Derived out = self();
        out.tail_ = out.head_ + n;
        return out;
    }

protected:
    static Expected<bool, ViewError> check_width(int width_bits, ByteOrder order) {
        if (width_bits < 1 || width_bits > 64) return ViewError::Domain;
        if (order == ByteOrder::Lsbf && width_bits % 8 != 0) return ViewError::Domain;
        return true;
    }

private:
    const Derived& self() const { return static_cast<const Derived&>(*this); }
};

}  // namespace detail

/// Read-only bit window over an immutable Buffer. Operations never mutate
/// their input; they return a new view.
class View : public detail::WindowOps<View> {
    friend class detail::WindowOps<View>;

public:
    View() = default;
    explicit View(Buffer b) : buffer_(std::move(b)), head_(0), tail_(buffer_.size_bits()) {}

    /// Decode the next width_bits as an unsigned integer and return the
    /// advanced view. Overflow if the window is shorter than the field.
    Expected<GetResult<View>, ViewError> get(int width_bits, ByteOrder order) const {
        auto chk = check_width(width_bits, order);
        if (!chk.ok()) return chk.error();
        if (width_bits > available_bits()) return ViewError::Overflow;
        uint64_t v = detail::read_bits(buffer_.data(), head_, width_bits);
        if (order == ByteOrder::Lsbf) v = detail::byte_reverse(v, width_bits);
        View rest = *this;
        rest.head_ += width_bits;
        return GetResult<View>{v, rest};
    }

    const Buffer& buffer() const { return buffer_; }

private:
    Buffer buffer_;
    int64_t head_ = 0;
    int64_t tail_ = 0;
};

/// Bit window over writable storage; supports the same window algebra plus
/// put. get is also available so round-trips can be checked mid-write.
class MutableView : public detail::WindowOps<MutableView> {
    friend class detail::WindowOps<MutableView>;

public:
    MutableView() = default;
    explicit MutableView(MutableBuffer b)
        : buffer_(std::move(b)), head_(0), tail_(buffer_.size_bits()) {}

    /// Encode value into the next width_bits and return the advanced view.
    /// Domain if the value does not fit the field width.
    Expected<MutableView, ViewError> put(uint64_t value, int width_bits, ByteOrder order) const {
        auto chk = check_width(width_bits, order);
        if (!chk.ok()) return chk.error();
        if (width_bits > available_bits()) return ViewError::Overflow;
        if (width_bits < 64 && value >= (uint64_t(1) << width_bits)) return ViewError::Domain;
        uint64_t v = order == ByteOrder::Lsbf ? detail::byte_reverse(value, width_bits) : value;
        detail::write_bits(buffer_.data(), head_, width_bits, v);
        MutableView rest = *this;
        rest.head_ += width_bits;
        return rest;
    }

    Expected<GetResult<MutableView>, ViewError> get(int width_bits, ByteOrder order) const {
        auto chk = check_width(width_bits, order);
        if (!chk.ok()) return chk.error();
        if (width_bits > available_bits()) return ViewError::Overflow;
        uint64_t v = detail::read_bits(buffer_.data(), head_, width_bits);
        if (order == ByteOrder::Lsbf) v = detail::byte_reverse(v, width_bits);
        MutableView rest = *this;
        rest.head_ += width_bits;
        return GetResult<MutableView>{v, rest};
    }

    /// Zero the next n bits and return the advanced view. Used to blank the
    /// unwritten remainder of a constrained window.
    Expected<MutableView, ViewError> fill_zero(int64_t n) const;

    MutableBuffer& storage() { return buffer_; }
    const MutableBuffer& storage() const { return buffer_; }

private:
    MutableBuffer buffer_;
    int64_t head_ = 0;
    int64_t tail_ = 0;
};

inline View make_view(const Buffer& b) { return View(b); }
inline MutableView make_view(const MutableBuffer& b) { return MutableView(b); }

}  // namespace msgc
