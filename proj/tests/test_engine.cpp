#include <doctest.h>

#include <string>
#include <vector>

#include "msgc/compile.hpp"
#include "msgc/diagnostics.hpp"
#include "msgc/engine.hpp"
#include "msgc/protocols.hpp"

using namespace msgc;

namespace {

CompiledModule must_compile(const std::string& text) {
    auto r = compile_sources({{"eng.stv", text}});
    REQUIRE_MESSAGE(r.ok(), (r.ok() ? std::string() : render(r.error())));
    return std::move(r).value();
}

ParseOutcome parse_bytes(const Engine& eng, const std::string& type,
                         const std::vector<uint8_t>& bytes,
                         const std::vector<uint64_t>& args = {}) {
    return eng.from_view(type, make_view(Buffer(bytes)), args);
}

ParseValue record_of(std::string type,
                     std::vector<std::pair<std::string, ParseValue>> fields) {
    ParseValue v = make_record();
    v.type_name = std::move(type);
    v.as<RecordV>()->fields = std::move(fields);
    return v;
}

}  // namespace

TEST_SUITE("engine") {

    TEST_CASE("sub-byte fields split a byte most significant first") {
        CompiledModule c = must_compile("def N = record { hi: uint(4); lo: uint(4); };");
        Engine eng(c.typed, c.ir);
        auto out = parse_bytes(eng, "N", {0x45});
        REQUIRE(out.ok());
        CHECK(eng.to_string_value(*out.value) == R"({"hi":4,"lo":5})");
    }

    TEST_CASE("byte order controls multi-byte decode") {
        CompiledModule c = must_compile("def M = uint(16, msbf); def L = uint(16, lsbf);");
        Engine eng(c.typed, c.ir);

        auto m = parse_bytes(eng, "M", {0x00, 0x0E});
        REQUIRE(m.ok());
        CHECK(m.value->as<UIntV>()->value == 14);

        auto l = parse_bytes(eng, "L", {0x0E, 0x00});
        REQUIRE(l.ok());
        CHECK(l.value->as<UIntV>()->value == 14);
    }

    TEST_CASE("payload round-trips through encode and decode") {
        Bundle b = load_bundle("openflow10").value();
        Engine eng(b.compiled.typed, b.compiled.ir);

        std::vector<uint8_t> bytes = {0x01, 0x00, 0x00, 0x0B, 0x00, 0x00, 0x00, 0x07,
                                      0xDE, 0xAD, 0xBE};
        auto out = parse_bytes(eng, "Msg", bytes);
        REQUIRE_MESSAGE(out.ok(), (out.ok() ? std::string() : to_string(*out.violation)));
        CHECK(out.consumed_bits == 88);

        auto enc = eng.to_buffer("Msg", *out.value);
        REQUIRE(enc.ok());
        CHECK(enc.value().bytes() == bytes);

        auto again = eng.from_view("Msg", make_view(enc.value()));
        REQUIRE(again.ok());
        auto eq = eng.equal("Msg", *out.value, *again.value);
        REQUIRE(eq.ok());
        CHECK(eq.value());
    }

    TEST_CASE("equality is structural and type names must agree") {
        Bundle b = load_bundle("openflow10").value();
        Engine eng(b.compiled.typed, b.compiled.ir);

        std::vector<uint8_t> one = {0x01, 0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x2A};
        std::vector<uint8_t> two = {0x01, 0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x2B};
        auto a = parse_bytes(eng, "Hdr", one);
        auto x = parse_bytes(eng, "Hdr", two);
        REQUIRE(a.ok());
        REQUIRE(x.ok());

        CHECK(eng.equal("Hdr", *a.value, *a.value).value());
        CHECK(!eng.equal("Hdr", *a.value, *x.value).value());
        CHECK(eng.not_equal("Hdr", *a.value, *x.value).value());

        auto m = parse_bytes(eng, "Msg", one);
        REQUIRE(m.ok());
        auto bad = eng.equal("Hdr", *a.value, *m.value);
        REQUIRE(!bad.ok());
        CHECK(bad.error().detail.find("type mismatch") != std::string::npos);
    }

    TEST_CASE("division by zero in a guard is a semantic failure") {
        CompiledModule c = must_compile(R"(
            def R = record {
                a: uint(8);
                b: uint(8) | b / a == 1;
            };
        )");
        Engine eng(c.typed, c.ir);
        auto out = parse_bytes(eng, "R", {0x00, 0x07});
        REQUIRE(!out.ok());
        CHECK(out.violation->kind == FailKind::Semantic);
        CHECK(out.violation->detail.find("division by zero") != std::string::npos);
    }

    TEST_CASE("division by zero in a window amount is structural") {
        CompiledModule c = must_compile(R"(
            def R = record {
                a: uint(8);
                v: vector(uint(8)) | constraint(8 / a);
            };
        )");
        Engine eng(c.typed, c.ir);
        auto out = parse_bytes(eng, "R", {0x00, 0x07});
        REQUIRE(!out.ok());
        CHECK(out.violation->kind == FailKind::Underflow);
    }

    TEST_CASE("negative runtime window is an underflow at the field") {
        Bundle b = load_bundle("inet").value();
        Engine eng(b.compiled.typed, b.compiled.ir);
        // Valid first byte (version 4) but ihl 4 < 5: options window is 4*(4-5) < 0.
        std::vector<uint8_t> bytes(20, 0);
        bytes[0] = 0x44;
        auto out = parse_bytes(eng, "Ipv4", bytes);
        REQUIRE(!out.ok());
        CHECK(out.violation->kind == FailKind::Underflow);
        CHECK(out.violation->detail.find("negative") != std::string::npos);
    }

    TEST_CASE("greedy sequences keep the parsed prefix unless strict") {
        Bundle b = load_bundle("openflow10").value();

        std::vector<uint8_t> bytes = {
            0x01, 0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x01,  // good Hello
            0x03, 0x00, 0x00, 0x08, 0x00, 0x00, 0x00, 0x02,  // bad version
        };

        Engine lenient(b.compiled.typed, b.compiled.ir);
        auto out = lenient.from_view("MsgStream", make_view(Buffer(bytes)));
        REQUIRE(out.ok());
        CHECK(out.consumed_bits == 64);
        REQUIRE(out.value->as<VectorV>() != nullptr);
        CHECK(out.value->as<VectorV>()->elems.size() == 1);

        ExecOptions strict_opts;
        strict_opts.strict_vectors = true;
        Engine strict(b.compiled.typed, b.compiled.ir, strict_opts);
        auto bad = strict.from_view("MsgStream", make_view(Buffer(bytes)));
        REQUIRE(!bad.ok());
        CHECK(bad.violation->kind == FailKind::Semantic);
        CHECK(bad.violation->path.find("[1]") != std::string::npos);
        CHECK(bad.violation->path.find("version") != std::string::npos);
    }

    TEST_CASE("write side enforces guards and element counts") {
        CompiledModule c = must_compile(R"(
            def P = record { v: uint(8) | v == 1; };
            def A = array(uint(8), 3);
        )");
        Engine eng(c.typed, c.ir);

        ParseValue bad_rec = record_of("P", {{"v", make_uint(9, 8)}});
        auto w = eng.to_buffer("P", bad_rec);
        REQUIRE(!w.ok());
        CHECK(w.error().kind == FailKind::Semantic);

        ParseValue short_arr = make_array();
        short_arr.type_name = "A";
        short_arr.as<ArrayV>()->elems = {make_uint(1, 8), make_uint(2, 8)};
        MutableBuffer buf(3);
        auto w2 = eng.to_view("A", MutableView(buf), short_arr);
        REQUIRE(!w2.ok());
        CHECK(w2.violation->detail.find("element count mismatch") != std::string::npos);
    }

    TEST_CASE("unfilled window bytes are written as zero") {
        Bundle b = load_bundle("openflow10").value();
        Engine eng(b.compiled.typed, b.compiled.ir);

        ParseValue hdr = record_of("Hdr", {});
        hdr.as<RecordV>()->fields = {{"version", make_uint(1, 8)},
                                     {"type", make_uint(0, 8)},
                                     {"len", make_uint(10, 16)},
                                     {"xid", make_uint(7, 32)}};
        ParseValue empty = make_vector();
        empty.type_name = "Hello";
        ParseValue pld = make_variant("Hello", 0, std::move(empty));
        pld.type_name = "Pld";
        ParseValue msg = record_of("Msg", {});
        msg.as<RecordV>()->fields.emplace_back("hdr", std::move(hdr));
        msg.as<RecordV>()->fields.emplace_back("pld", std::move(pld));

        auto enc = eng.to_buffer("Msg", msg);
        REQUIRE_MESSAGE(enc.ok(), (enc.ok() ? std::string() : to_string(enc.error())));
        std::vector<uint8_t> expect = {0x01, 0x00, 0x00, 0x0A, 0x00, 0x00, 0x00, 0x07,
                                       0x00, 0x00};
        CHECK(enc.value().bytes() == expect);
    }

    TEST_CASE("serialized size walks the value") {
        Bundle b = load_bundle("openflow10").value();
        Engine eng(b.compiled.typed, b.compiled.ir);
        std::vector<uint8_t> bytes = {0x01, 0x00, 0x00, 0x0B, 0x00, 0x00, 0x00, 0x07,
                                      0xDE, 0xAD, 0xBE};
        auto out = parse_bytes(eng, "Msg", bytes);
        REQUIRE(out.ok());
        auto n = eng.bytes("Msg", *out.value);
        REQUIRE(n.ok());
        CHECK(n.value() == 11);
    }

    TEST_CASE("a parameterized variant can be driven directly") {
        Bundle b = load_bundle("openflow10").value();
        Engine eng(b.compiled.typed, b.compiled.ir);
        auto out = parse_bytes(eng, "Pld", {0xAA, 0xBB}, {0});
        REQUIRE(out.ok());
        auto* v = out.value->as<VariantV>();
        REQUIRE(v != nullptr);
        CHECK(v->arm_name == "Hello");
        CHECK(out.consumed_bits == 16);
    }

    TEST_CASE("the instruction budget stops runaway work defensively") {
        CompiledModule c = must_compile("def V = vector(uint(8));");
        ExecOptions opts;
        opts.fuel = 100;
        Engine eng(c.typed, c.ir, opts);
        std::vector<uint8_t> big(4096, 0x55);
        auto out = eng.from_view("V", make_view(Buffer(big)));
        REQUIRE(!out.ok());
        CHECK(out.violation->defensive);
        CHECK(out.violation->detail.find("budget") != std::string::npos);
    }

    TEST_CASE("variant and array values render as canonical json") {
        Bundle b = load_bundle("inet").value();
        Engine eng(b.compiled.typed, b.compiled.ir);
        std::vector<uint8_t> bytes = {0x01, 0x02, 0x03, 0x04, 0x05, 0x06,  // dst
                                      0x11, 0x12, 0x13, 0x14, 0x15, 0x16,  // src
                                      0x08, 0x00};
        auto out = parse_bytes(eng, "EthHdr", bytes);
        REQUIRE(out.ok());
        CHECK(eng.to_string_value(*out.value) ==
              R"({"dst":[1,2,3,4,5,6],"src":[17,18,19,20,21,22],"ethertype":2048})");
    }
}
