#include <doctest.h>

#include <random>

#include "msgc/buffer_view.hpp"

using namespace msgc;

namespace {

uint64_t bounded(std::mt19937_64& rng, uint64_t n) { return rng() % n; }

}  // namespace

TEST_SUITE("buffer_view") {

TEST_CASE("whole buffer view reports its size in bits and bytes") {
    Buffer b(std::vector<uint8_t>{1, 2, 3, 4});
    View v = make_view(b);
    CHECK(v.head_bits() == 0);
    CHECK(v.tail_bits() == 32);
    CHECK(v.available_bits() == 32);
    CHECK(v.available_bytes() == 4);
}

TEST_CASE("nibble decode splits a byte in stream order") {
    // 0x45 carries 4 then 5 when read as two 4-bit fields.
    Buffer b(std::vector<uint8_t>{0x45});
    View v = make_view(b);
    auto first = v.get(4, ByteOrder::Msbf);
    REQUIRE(first.ok());
    CHECK(first->value == 4);
    auto second = first->rest.get(4, ByteOrder::Msbf);
    REQUIRE(second.ok());
    CHECK(second->value == 5);
    CHECK(second->rest.available_bits() == 0);
}

TEST_CASE("msbf and lsbf decode of a 16-bit field") {
    Buffer b(std::vector<uint8_t>{0x12, 0x34});
    View v = make_view(b);
    CHECK(v.get(16, ByteOrder::Msbf)->value == 0x1234);
    CHECK(v.get(16, ByteOrder::Lsbf)->value == 0x3412);
}

TEST_CASE("get does not mutate its input view") {
    Buffer b(std::vector<uint8_t>{0xFF, 0x00});
    View v = make_view(b);
    auto r = v.get(8, ByteOrder::Msbf);
    REQUIRE(r.ok());
    CHECK(v.available_bits() == 16);
    CHECK(r->rest.available_bits() == 8);
}

TEST_CASE("get past the window reports overflow") {
    Buffer b(std::vector<uint8_t>{0xAB});
    View v = make_view(b);
    auto r = v.get(16, ByteOrder::Msbf);
    REQUIRE(!r.ok());
    CHECK(r.error() == ViewError::Overflow);
}

TEST_CASE("advance consumes bits and overflows past the end") {
    Buffer b(std::vector<uint8_t>{1, 2});
    View v = make_view(b);
    auto a = v.advance(8);
    REQUIRE(a.ok());
    CHECK(a->available_bits() == 8);
    CHECK(a->get(8, ByteOrder::Msbf)->value == 2);
    auto bad = v.advance(17);
    REQUIRE(!bad.ok());
    CHECK(bad.error() == ViewError::Overflow);
    CHECK(!v.advance(-1).ok());
}

TEST_CASE("constrain narrows the window and underflows when too large") {
    Buffer b(std::vector<uint8_t>{1, 2, 3});
    View v = make_view(b);
    auto c = v.constrain(8);
    REQUIRE(c.ok());
    CHECK(c->available_bits() == 8);
    CHECK(!c->get(16, ByteOrder::Msbf).ok());
    auto bad = v.constrain(25);
    REQUIRE(!bad.ok());
    CHECK(bad.error() == ViewError::Underflow);
    auto neg = v.constrain(-1);
    REQUIRE(!neg.ok());
    CHECK(neg.error() == ViewError::Underflow);
}

TEST_CASE("width domain checks") {
    Buffer b(std::vector<uint8_t>(16, 0));
    View v = make_view(b);
    CHECK(v.get(0, ByteOrder::Msbf).error() == ViewError::Domain);
    CHECK(v.get(65, ByteOrder::Msbf).error() == ViewError::Domain);
    CHECK(v.get(12, ByteOrder::Lsbf).error() == ViewError::Domain);
    CHECK(v.get(64, ByteOrder::Msbf).ok());
}

TEST_CASE("put rejects values wider than the field") {
    MutableBuffer mb(2);
    MutableView v = make_view(mb);
    CHECK(v.put(256, 8, ByteOrder::Msbf).error() == ViewError::Domain);
    CHECK(v.put(255, 8, ByteOrder::Msbf).ok());
}

TEST_CASE("get after put is the identity for all widths and both orders") {
    std::mt19937_64 rng(7);
    for (int width = 1; width <= 64; ++width) {
        for (ByteOrder order : {ByteOrder::Msbf, ByteOrder::Lsbf}) {
            if (order == ByteOrder::Lsbf && width % 8 != 0) continue;
            for (int trial = 0; trial < 50; ++trial) {
                uint64_t value = rng();
                if (width < 64) value &= (uint64_t(1) << width) - 1;
                // Random bit offset so identity holds mid-stream too.
                int64_t offset = static_cast<int64_t>(bounded(rng, 32));
                if (order == ByteOrder::Lsbf) offset = (offset / 8) * 8;
                MutableBuffer mb(16);
                MutableView mv = make_view(mb);
                auto pos = mv.advance(offset);
                REQUIRE(pos.ok());
                auto wrote = pos->put(value, width, order);
                REQUIRE(wrote.ok());
                View rv = make_view(mb.freeze());
                auto rpos = rv.advance(offset);
                REQUIRE(rpos.ok());
                auto got = rpos->get(width, order);
                REQUIRE(got.ok());
                CHECK(got->value == value);
            }
        }
    }
}

TEST_CASE("put then get does not disturb neighboring bits") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<uint8_t> original(8);
        for (auto& b : original) b = static_cast<uint8_t>(rng());
        int width = 1 + static_cast<int>(bounded(rng, 16));
        int64_t offset = static_cast<int64_t>(bounded(rng, 64 - static_cast<uint64_t>(width)));
        uint64_t value = rng() & ((uint64_t(1) << width) - 1);

        MutableBuffer mb(8);
        for (int i = 0; i < 8; ++i) mb.data()[i] = original[static_cast<size_t>(i)];
        MutableView mv = make_view(mb);
        REQUIRE(mv.advance(offset)->put(value, width, ByteOrder::Msbf).ok());

        View rv = make_view(mb.freeze());
        // Bits outside [offset, offset+width) must be untouched.
        for (int64_t bit = 0; bit < 64; ++bit) {
            if (bit >= offset && bit < offset + width) continue;
            int orig = (original[static_cast<size_t>(bit / 8)] >> (7 - bit % 8)) & 1;
            auto got = rv.advance(bit)->get(1, ByteOrder::Msbf);
            REQUIRE(got.ok());
            CHECK(static_cast<int>(got->value) == orig);
        }
    }
}

TEST_CASE("fill_zero blanks exactly the requested span") {
    MutableBuffer mb(4);
    for (int i = 0; i < 4; ++i) mb.data()[i] = 0xFF;
    MutableView mv = make_view(mb);
    auto after = mv.advance(8)->fill_zero(16);
    REQUIRE(after.ok());
    Buffer frozen = mb.freeze();
    CHECK(frozen.bytes()[0] == 0xFF);
    CHECK(frozen.bytes()[1] == 0x00);
    CHECK(frozen.bytes()[2] == 0x00);
    CHECK(frozen.bytes()[3] == 0xFF);
}

TEST_CASE("views share the buffer and keep it alive") {
    View v;
    {
        Buffer b(std::vector<uint8_t>{9, 8, 7});
        v = make_view(b);
    }
    CHECK(v.get(8, ByteOrder::Msbf)->value == 9);
}

TEST_CASE("random op sequences keep the window invariant") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 500; ++trial) {
        Buffer b(std::vector<uint8_t>(static_cast<size_t>(bounded(rng, 32)), 0x5A));
        View v = make_view(b);
        for (int step = 0; step < 20; ++step) {
            CHECK(v.available_bits() >= 0);
            CHECK(v.head_bits() <= v.tail_bits());
            switch (bounded(rng, 3)) {
                case 0: {
                    auto r = v.advance(static_cast<int64_t>(bounded(rng, 40)));
                    if (r.ok()) v = r.value();
                    break;
                }
                case 1: {
                    auto r = v.constrain(static_cast<int64_t>(bounded(rng, 40)));
                    if (r.ok()) v = r.value();
                    break;
                }
                default: {
                    auto r = v.get(1 + static_cast<int>(bounded(rng, 64)), ByteOrder::Msbf);
                    if (r.ok()) v = r->rest;
                    break;
                }
            }
        }
    }
}

}  // TEST_SUITE
