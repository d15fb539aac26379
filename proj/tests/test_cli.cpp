#include <cstdio>
#include <fstream>
#include <sstream>

#include <doctest.h>
#include <json.hpp>

#include "msgc/commands.hpp"
#include "msgc/pcap.hpp"
#include "msgc/protocols.hpp"

using namespace msgc;

namespace {

struct CliRun {
    int code = 0;
    std::string out;
    std::string err;
};

CliRun run(std::vector<std::string> args) {
    args.insert(args.begin(), "msgc");
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string spec_path(const std::string& file) { return default_specs_dir() + "/" + file; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const std::string& path) {
    std::string reason;
    auto text = read_text_file(path, reason);
    REQUIRE(text.has_value());
    return *text;
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("compile reports guard ratio and dumps on request") {
        auto r = run({"compile", spec_path("inet.stv"), spec_path("openflow10.stv")});
        CHECK(r.code == kExitOk);
        CHECK(r.out.find("ok:") != std::string::npos);
        CHECK(r.out.find("static guards") != std::string::npos);

        auto ir = run({"compile", spec_path("openflow10.stv"), "--dump-ir"});
        CHECK(ir.code == kExitOk);
        CHECK(ir.out.find("op Hdr.from_view:") != std::string::npos);
        CHECK(ir.out.find("GUARD") != std::string::npos);

        auto csg = run({"compile", spec_path("openflow10.stv"), "--dump-csg"});
        CHECK(csg.code == kExitOk);
        CHECK(csg.out.find("->") != std::string::npos);

        // The shipped Hdr path carries one fused guard; as synthesized it
        // carries four.
        auto raw = run({"compile", spec_path("openflow10.stv"), "--no-optimize", "--dump-ir"});
        CHECK(raw.code == kExitOk);
        auto count_hdr_guards = [](const std::string& dump) {
            size_t at = dump.find("op Hdr.from_view:");
            size_t end = dump.find("op Hdr.to_view:", at);
            int guards = 0;
            for (size_t p = dump.find("GUARD", at); p != std::string::npos && p < end;
                 p = dump.find("GUARD", p + 1)) {
                ++guards;
            }
            return guards;
        };
        CHECK(count_hdr_guards(ir.out) == 1);
        CHECK(count_hdr_guards(raw.out) == 4);
    }

    TEST_CASE("compile failures exit 1 with diagnostics") {
        const std::string path = "/tmp/msgc_cli_bad.stv";
        write_file(path, "def X = record { a: uint(8) | b == 1; };\n");
        auto r = run({"compile", path});
        CHECK(r.code == kExitCompileFailure);
        CHECK(r.err.find("error[") != std::string::npos);
        std::remove(path.c_str());
    }

    TEST_CASE("unreadable inputs exit 2") {
        CHECK(run({"compile", "/tmp/msgc_no_such.stv"}).code == kExitIo);
        CHECK(run({"analyze", "/tmp/msgc_no_such.pcap", "--bundle", "openflow10"}).code ==
              kExitIo);
        CHECK(run({"gen", "/tmp/msgc_cli_out.pcap", "--plan", "/tmp/msgc_no_such.json"}).code ==
              kExitIo);
    }

    TEST_CASE("usage errors exit 2, help exits 0") {
        CHECK(run({"frobnicate"}).code == kExitIo);
        CHECK(run({}).code == kExitIo);
        CHECK(run({"analyze", "x.pcap"}).code == kExitIo);  // --bundle missing
        CHECK(run({"--help"}).code == kExitOk);
    }

    TEST_CASE("gen then analyze round trip with seed override") {
        const std::string plan = "/tmp/msgc_cli_plan.json";
        const std::string pcap = "/tmp/msgc_cli_trace.pcap";
        write_file(plan, R"({"ipv4":12,"udp":6,"openflow":5,
                             "ihl_overflow":2,"udp_min_header":1,"seed":3})");

        auto g1 = run({"gen", pcap, "--plan", plan});
        REQUIRE(g1.code == kExitOk);
        CHECK(g1.out.find("wrote 23 packets") != std::string::npos);
        CHECK(g1.out.find("3 injected violations") != std::string::npos);
        std::string bytes1 = slurp(pcap);
        std::string truth1 = slurp(pcap + ".truth.json");

        // Same plan, same seed: byte-identical; --seed overrides the plan.
        auto g2 = run({"gen", pcap, "--plan", plan});
        REQUIRE(g2.code == kExitOk);
        CHECK(slurp(pcap) == bytes1);
        auto g3 = run({"gen", pcap, "--plan", plan, "--seed", "4"});
        REQUIRE(g3.code == kExitOk);
        CHECK(slurp(pcap) != bytes1);
        auto g4 = run({"gen", pcap, "--plan", plan, "--seed", "3"});
        REQUIRE(g4.code == kExitOk);
        CHECK(slurp(pcap) == bytes1);

        const std::string json = "/tmp/msgc_cli_report.json";
        auto a = run({"analyze", pcap, "--bundle", "openflow10", "--json", json, "--workers",
                      "3"});
        REQUIRE(a.code == kExitOk);
        CHECK(a.out.find("protocol") != std::string::npos);
        CHECK(a.out.find("ipv4") != std::string::npos);

        auto report = nlohmann::json::parse(slurp(json));
        auto truth = nlohmann::json::parse(truth1);
        CHECK(report["schema"] == 1);
        CHECK(report["violations"].size() == truth["violations"].size());

        std::remove(plan.c_str());
        std::remove(pcap.c_str());
        std::remove((pcap + ".truth.json").c_str());
        std::remove(json.c_str());
    }

    TEST_CASE("fuzz summarizes a clean differential run") {
        auto r = run({"fuzz", "--bundle", "openflow10", "-n", "50", "--seed", "9"});
        CHECK(r.code == kExitOk);
        CHECK(r.out.find("0 mismatches") != std::string::npos);
        CHECK(r.err.empty());

        auto zero = run({"fuzz", "--bundle", "openflow10", "-n", "0"});
        CHECK(zero.code == kExitOk);
        CHECK(zero.out.find("x 0 runs, 0 mismatches") != std::string::npos);
    }

    TEST_CASE("fuzz of an unknown bundle exits 1") {
        auto r = run({"fuzz", "--bundle", "bogus", "-n", "1"});
        CHECK(r.code == kExitCompileFailure);
        CHECK(r.err.find("unknown bundle") != std::string::npos);
    }
}
