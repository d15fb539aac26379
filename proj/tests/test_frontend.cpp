#include <doctest.h>

#include <algorithm>

#include "msgc/diagnostics.hpp"
#include "msgc/parser.hpp"
#include "msgc/typecheck.hpp"

using namespace msgc;

namespace {

SpecModule must_parse(std::string_view src) {
    auto r = parse_spec(src, "test.stv");
    REQUIRE_MESSAGE(r.ok(), (r.ok() ? std::string() : render(r.error())));
    return std::move(r).value();
}

TypedModule must_typecheck(std::string_view src) {
    auto t = typecheck(must_parse(src));
    REQUIRE_MESSAGE(t.ok(), (t.ok() ? std::string() : render(t.error())));
    return std::move(t).value();
}

std::vector<Diag> typecheck_errors(std::string_view src) {
    auto t = typecheck(must_parse(src));
    REQUIRE(!t.ok());
    return t.error();
}

bool has_code(const std::vector<Diag>& ds, const std::string& code) {
    return std::any_of(ds.begin(), ds.end(), [&](const Diag& d) { return d.code == code; });
}

}  // namespace

TEST_SUITE("parser") {

    TEST_CASE("scalar definition") {
        SpecModule m = must_parse("def B = uint(16, msbf);");
        REQUIRE(m.types.size() == 1);
        CHECK(m.types[0].name == "B");
        auto* u = std::get_if<UIntType>(&m.types[0].body.node);
        REQUIRE(u != nullptr);
        CHECK(u->width_bits == 16);
        CHECK(u->order == ByteOrder::Msbf);
    }

    TEST_CASE("parse then print then parse yields an equal module") {
        const char* src = R"(
            // byte order defaults to msbf
            def Tag = uint(8);
            def Word = uint(16, lsbf);
            def Mac = array(uint(8), 6);
            def Blob = vector(uint(8));
            def Hdr = record {
                version: uint(8) | version == 1;
                type: uint(8) | type <= 0x15;
                len: uint(16, msbf) | len >= 8;
                xid: uint(32, msbf);
            };
            pred valid_hdr(h: Hdr) = h.version == 1 and h.type <= 21 and h.len >= 8;
            def Pay(t: uint(8)) = variant(t) {
                Blob if t == 0 or t == 1;
                Mac if not (t == 2) and t * 2 - 1 >= 5;
                Blob2 if true;
            };
            def Blob2 = vector(uint(16, msbf));
            def Msg = record {
                hdr: Hdr | valid_hdr(hdr);
                pld: Pay(hdr.type) | constraint(hdr.len - bytes(hdr));
            };
        )";
        SpecModule m1 = must_parse(src);
        std::string printed = to_string(m1);
        auto r2 = parse_spec(printed, "printed.stv");
        REQUIRE_MESSAGE(r2.ok(), (r2.ok() ? render(r2.error()) : printed));
        CHECK(m1 == r2.value());
        CHECK(printed == to_string(r2.value()));
    }

    TEST_CASE("guard must come before constraint") {
        auto r = parse_spec("def R = record { f: vector(uint(8)) | constraint(4) | f == 1; };",
                            "test.stv");
        REQUIRE(!r.ok());
        CHECK(r.error().code == "P001");
    }

    TEST_CASE("empty record is rejected") {
        auto r = parse_spec("def R = record { };", "test.stv");
        REQUIRE(!r.ok());
        CHECK(r.error().code == "P001");
    }

    TEST_CASE("expression precedence binds multiplication over comparison over and") {
        auto e = parse_expr_text("a + 2 * 3 <= b and not c == 1");
        REQUIRE(e.ok());
        CHECK(to_string(e.value()) == "a + 2 * 3 <= b and not (c == 1)");
        auto again = parse_expr_text(to_string(e.value()));
        REQUIRE(again.ok());
        CHECK(e.value() == again.value());
    }
}

TEST_SUITE("typecheck") {

    TEST_CASE("width bounds") {
        auto ds = typecheck_errors("def A = uint(0);");
        CHECK(has_code(ds, "T003"));
        CHECK(ds[0].message == "width must be >= 1");

        ds = typecheck_errors("def A = uint(65);");
        CHECK(has_code(ds, "T003"));
        CHECK(ds[0].message == "width must be <= 64");
    }

    TEST_CASE("forward references are rejected in dependency order") {
        auto ds = typecheck_errors(R"(
            def Msg = record { hdr: Hdr; };
            def Hdr = record { v: uint(8); };
        )");
        REQUIRE(has_code(ds, "T004"));
        CHECK(ds[0].message.find("dependency order") != std::string::npos);
    }

    TEST_CASE("guard referencing a later field is rejected") {
        auto ds = typecheck_errors(R"(
            def R = record {
                a: uint(8) | b == 1;
                b: uint(8);
            };
        )");
        CHECK(has_code(ds, "T016"));
    }

    TEST_CASE("all violations are collected, not just the first") {
        auto ds = typecheck_errors(R"(
            def A = uint(0);
            def B = uint(65);
        )");
        CHECK(ds.size() == 2);
    }

    TEST_CASE("constant sizes") {
        TypedModule t = must_typecheck(R"(
            def Hdr = record {
                version: uint(8);
                type: uint(8);
                len: uint(16, msbf);
                xid: uint(32, msbf);
            };
            def Quad = array(uint(32), 4);
            def Blob = vector(uint(8));
        )");
        auto size = [&](const char* n) { return constant_size_of(t, n); };
        CHECK(*size("Hdr").value() == 64);
        CHECK(*size("Quad").value() == 128);
        CHECK(!size("Blob").value().has_value());
        CHECK(!size("NoSuch").ok());
    }

    TEST_CASE("duplicated variant arm predicates warn but compile") {
        TypedModule t = must_typecheck(R"(
            def A = vector(uint(8));
            def B = vector(uint(8));
            def V(t: uint(8)) = variant(t) {
                A if t == 2;
                B if t == 2;
            };
        )");
        REQUIRE(!t.warnings.empty());
        CHECK(t.warnings[0].code == "T013");
    }

    TEST_CASE("typecheck does not depend on unrelated definition order") {
        TypedModule t1 = must_typecheck("def A = uint(8); def B = uint(16);");
        TypedModule t2 = must_typecheck("def B = uint(16); def A = uint(8);");
        CHECK(t1.info.at("A").const_size_bits == t2.info.at("A").const_size_bits);
        CHECK(t1.info.at("B").const_size_bits == t2.info.at("B").const_size_bits);
    }
}
