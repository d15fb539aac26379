// End-to-end acceptance checks over the shipped protocol bundles. Each check
// prints one PASS/FAIL line; the process exits nonzero if any check fails.
// Thresholds are pinned here, next to the check that enforces them.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "msgc/analyzer.hpp"
#include "msgc/commands.hpp"
#include "msgc/engine.hpp"
#include "msgc/protocols.hpp"
#include "msgc/safety.hpp"
#include "msgc/trace_gen.hpp"
#include "msgc/value.hpp"

using namespace msgc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Bundle must_load(const std::string& name) {
    auto b = load_bundle(name);
    if (!b.ok()) {
        std::fprintf(stderr, "cannot load bundle %s:\n%s", name.c_str(),
                     render(b.error()).c_str());
        std::exit(2);
    }
    return std::move(b.value());
}

std::vector<uint8_t> random_bytes(std::mt19937_64& rng, size_t n) {
    std::vector<uint8_t> out(n);
    for (auto& b : out) b = static_cast<uint8_t>(rng());
    return out;
}

std::vector<std::string> plain_types(const TypedModule& typed) {
    std::vector<std::string> names;
    for (const auto& name : typed.order) {
        const TypeDef* def = typed.find_type(name);
        if (def != nullptr && def->params.empty()) names.push_back(name);
    }
    return names;
}

int top_level_guards(const ModuleIR& mod, const std::string& type) {
    const OperationIR* op = mod.find(type, OpKind::FromView);
    if (op == nullptr) return -1;
    int n = 0;
    for (const auto& in : op->body) {
        if (in.is<GuardConst>()) ++n;
    }
    return n;
}

// --- check 1: header domain enforcement ------------------------------------

constexpr int kDomainBuffers = 100000;

Outcome check_header_domain() {
    Bundle b = must_load("openflow10");
    Engine eng(b.compiled.typed, b.compiled.ir);
    std::mt19937_64 rng(0x5EED0001);

    int64_t mismatches = 0;
    for (int i = 0; i < kDomainBuffers; ++i) {
        std::vector<uint8_t> bytes = random_bytes(rng, 8);
        // Nudge a slice of the corpus toward the accept region so both
        // verdicts are exercised heavily.
        if (i % 4 == 0) bytes[0] = 1;
        if (i % 8 == 0) {
            bytes[1] = static_cast<uint8_t>(bytes[1] % 22);
            bytes[2] = 0;
        }

        uint64_t version = bytes[0];
        uint64_t type = bytes[1];
        uint64_t len = (static_cast<uint64_t>(bytes[2]) << 8) | bytes[3];
        uint64_t xid = (static_cast<uint64_t>(bytes[4]) << 24) |
                       (static_cast<uint64_t>(bytes[5]) << 16) |
                       (static_cast<uint64_t>(bytes[6]) << 8) | bytes[7];
        bool oracle_accept = version == 1 && type <= 21 && len >= 8;

        auto out = eng.from_view("Hdr", View(Buffer(bytes)));
        if (out.ok() != oracle_accept) {
            ++mismatches;
            continue;
        }
        if (out.ok()) {
            bool fields_match = uint_at(*out.value, "version") == version &&
                                uint_at(*out.value, "type") == type &&
                                uint_at(*out.value, "len") == len &&
                                uint_at(*out.value, "xid") == xid;
            if (!fields_match) ++mismatches;
        }
    }

    std::ostringstream d;
    d << kDomainBuffers << " random 8-byte buffers, " << mismatches << " verdict/field mismatches";
    return {mismatches == 0, d.str()};
}

// --- check 2: structural failure modes --------------------------------------

constexpr int kStructural = 1000;

Outcome check_structural_kinds() {
    Bundle b = must_load("openflow10_struct");
    Engine eng(b.compiled.typed, b.compiled.ir);
    std::mt19937_64 rng(0x5EED0002);

    int64_t wrong = 0;
    auto expect = [&](const std::vector<uint8_t>& bytes, FailKind want) {
        auto out = eng.from_view("Msg", View(Buffer(bytes)));
        if (out.ok() || out.violation->kind != want) ++wrong;
    };

    for (int i = 0; i < kStructural; ++i) {
        // Anything shorter than the fixed header must overflow.
        expect(random_bytes(rng, static_cast<size_t>(i % 8)), FailKind::Overflow);

        // A matched arm whose window reaches back past the header must
        // underflow at the window constraint.
        std::vector<uint8_t> small = random_bytes(rng, 8);
        small[1] = static_cast<uint8_t>(i % 22);
        small[2] = 0;
        small[3] = 6;
        expect(small, FailKind::Underflow);

        // A tag outside every arm predicate must fail arm selection.
        std::vector<uint8_t> untagged = random_bytes(rng, 8);
        untagged[1] = 22;
        untagged[2] = 0;
        untagged[3] = 8;
        expect(untagged, FailKind::InvalidVariant);
    }

    std::ostringstream d;
    d << 3 * kStructural << " crafted buffers, " << wrong << " wrong failure kinds";
    return {wrong == 0, d.str()};
}

// --- check 3: guard optimization --------------------------------------------

constexpr double kGuardTimeBudget = 1.0;  // seconds

Outcome check_guard_optimization() {
    auto start = Clock::now();
    Bundle b = must_load("openflow10");
    const CompiledModule& cm = b.compiled;
    Engine raw(cm.typed, cm.raw_ir);
    Engine opt(cm.typed, cm.ir);

    int static_before = top_level_guards(cm.raw_ir, "Hdr");
    int static_after = top_level_guards(cm.ir, "Hdr");

    std::mt19937_64 rng(0x5EED0003);
    int64_t dynamic_regressions = 0;
    bool hdr_strict = false;
    for (int i = 0; i < 2000; ++i) {
        size_t len = static_cast<size_t>(rng() % 64);
        std::vector<uint8_t> bytes = random_bytes(rng, std::max<size_t>(len, 8));
        if (i % 2 == 0) {
            bytes[0] = 1;
            bytes[1] = static_cast<uint8_t>(i % 22);
            bytes[2] = 0;
            bytes[3] = 8;
        }
        for (const char* type : {"Hdr", "Msg"}) {
            auto a = raw.from_view(type, View(Buffer(bytes)));
            auto o = opt.from_view(type, View(Buffer(bytes)));
            if (o.stats.guard_checks > a.stats.guard_checks) ++dynamic_regressions;
        }
        std::vector<uint8_t> valid = {1, 0, 0, 8, 0, 0, 0, 42};
        auto a = raw.from_view("Hdr", View(Buffer(valid)));
        auto o = opt.from_view("Hdr", View(Buffer(valid)));
        if (a.stats.guard_checks == 4 && o.stats.guard_checks == 1) hdr_strict = true;
    }
    double elapsed = seconds_since(start);

    bool pass = static_before == 4 && static_after == 1 && dynamic_regressions == 0 &&
                hdr_strict && elapsed < kGuardTimeBudget;
    std::ostringstream d;
    d << "Hdr static guards " << static_before << " -> " << static_after
      << ", dynamic regressions " << dynamic_regressions << ", strict 4-vs-1 on valid header "
      << (hdr_strict ? "seen" : "missing") << ", " << std::fixed << elapsed << "s";
    return {pass, d.str()};
}

// --- check 4: semantics preservation under optimization ---------------------

constexpr int64_t kFuzzIterations = 10000;

Outcome check_differential_fuzz() {
    int64_t failures = 0;
    std::ostringstream sink;
    std::ostringstream err;
    for (const char* bundle : {"openflow10", "openflow10_struct"}) {
        FuzzArgs args;
        args.bundle = bundle;
        args.iterations = kFuzzIterations;
        args.seed = 0x5EED0004;
        if (cmd_fuzz(args, sink, err) != kExitOk) ++failures;
    }
    std::ostringstream d;
    d << kFuzzIterations << " buffers per definition over 2 bundles, "
      << (failures == 0 ? "0 mismatches" : "mismatching bundles: " + std::to_string(failures));
    return {failures == 0, d.str()};
}

// --- check 5: verifier mutation suite ----------------------------------------

Outcome check_mutation_suite() {
    Bundle b = must_load("openflow10");
    int caught = 0;
    int total = 0;

    auto expect_error = [&](ModuleIR mutated, SafetyErrorKind want) {
        ++total;
        SafetyProof p = verify(b.compiled.typed, mutated);
        if (!p.ok() && p.errors[0].kind == want) ++caught;
    };

    for (const char* type : {"Hdr", "UdpHdr", "TcpFixed"}) {
        ModuleIR mutated = b.compiled.raw_ir;
        InstrList& body = mutated.find(type, OpKind::FromView)->body;
        auto it = std::find_if(body.begin(), body.end(),
                               [](const Instr& in) { return in.is<GuardConst>(); });
        if (it != body.end()) body.erase(it);
        expect_error(std::move(mutated), SafetyErrorKind::PossibleOverflow);
    }

    struct Site {
        const char* type;
        OpKind op;
    };
    for (Site s : {Site{"Msg", OpKind::FromView}, Site{"Msg", OpKind::ToView},
                   Site{"Action", OpKind::FromView}}) {
        ModuleIR mutated = b.compiled.raw_ir;
        InstrList& body = mutated.find(s.type, s.op)->body;
        auto it = std::find_if(body.begin(), body.end(),
                               [](const Instr& in) { return in.is<SelectArmInstr>(); });
        if (it != body.end()) body.erase(it);
        expect_error(std::move(mutated), SafetyErrorKind::UninitializedVariantAccess);
    }

    for (const char* type : {"Hdr", "UdpHdr", "TcpFixed"}) {
        ModuleIR mutated = b.compiled.raw_ir;
        InstrList& body = mutated.find(type, OpKind::FromView)->body;
        auto it = std::find_if(body.begin(), body.end(),
                               [](const Instr& in) { return in.is<ReadInstr>(); });
        if (it != body.end()) it->as<ReadInstr>()->width_bits += 64;
        expect_error(std::move(mutated), SafetyErrorKind::PossibleOverflow);
    }

    std::ostringstream d;
    d << caught << "/" << total << " mutations rejected with the right fault kind";
    return {caught == 9 && total == 9, d.str()};
}

// --- check 6: round-trip law -------------------------------------------------

constexpr int kRoundTripValues = 1000;
constexpr int64_t kRoundTripTrialCap = 4000000;

Outcome check_round_trip() {
    Bundle b = must_load("openflow10");
    Engine eng(b.compiled.typed, b.compiled.ir);
    std::mt19937_64 rng(0x5EED0006);

    int64_t failures = 0;
    int64_t starved = 0;
    std::vector<std::string> types = plain_types(b.compiled.typed);

    for (const auto& type : types) {
        int accepted = 0;
        int64_t trials = 0;
        while (accepted < kRoundTripValues && trials < kRoundTripTrialCap) {
            ++trials;
            size_t len = 8 + static_cast<size_t>(rng() % 88);
            std::vector<uint8_t> bytes = random_bytes(rng, len);
            // Bias a slice of the stream toward in-domain headers so guarded
            // types reach their accept region quickly.
            switch (trials % 3) {
                case 1:
                    bytes[0] = 1;
                    bytes[1] = static_cast<uint8_t>(bytes[1] % 22);
                    bytes[2] = 0;
                    bytes[3] = static_cast<uint8_t>(8 + bytes[3] % 24);
                    break;
                case 2:
                    bytes[0] = (bytes[0] % 2 == 0) ? 0x45 : 0x60;
                    break;
                default:
                    break;
            }

            auto parsed = eng.from_view(type, View(Buffer(bytes)));
            if (!parsed.ok()) continue;
            ++accepted;

            auto encoded = eng.to_buffer(type, *parsed.value);
            if (!encoded.ok()) {
                ++failures;
                continue;
            }
            auto reparsed = eng.from_view(type, View(encoded.value()));
            if (!reparsed.ok() || !equal_values(*parsed.value, *reparsed.value)) ++failures;
        }
        if (accepted < kRoundTripValues) ++starved;
    }

    std::ostringstream d;
    d << types.size() << " definitions x " << kRoundTripValues << " values, " << failures
      << " round-trip failures, " << starved << " starved generators";
    return {failures == 0 && starved == 0, d.str()};
}

// --- check 7: analyzer exactness ----------------------------------------------

constexpr double kAnalyzeTimeBudget = 10.0;  // seconds

Outcome check_analyzer_exactness() {
    GenPlan plan;
    plan.ipv4 = 300;
    plan.ipv6 = 100;
    plan.tcp = 250;
    plan.udp = 200;
    plan.openflow = 180;
    plan.ihl_overflow = 16;
    plan.tcp_min_header = 12;
    plan.udp_min_header = 10;
    plan.openflow_bad_version = 8;
    plan.seed = 42;

    GeneratedTrace trace = generate_trace(plan);
    Bundle b = must_load("openflow10");

    auto start = Clock::now();
    AnalyzeOptions opts;
    opts.workers = 4;
    auto report = analyze(trace.pcap, b, opts);
    double elapsed = seconds_since(start);
    if (!report.ok()) return {false, "analyze failed: " + report.error()};

    using Mark = std::tuple<int64_t, std::string, std::string>;
    std::set<Mark> want;
    for (const auto& e : trace.truth) want.insert({e.packet, e.protocol, e.kind});
    std::set<Mark> got;
    for (const auto& v : report.value().violations) got.insert({v.packet, v.protocol, v.klass});

    bool exact = want == got;
    bool clean_ok = report.value().clean ==
                    report.value().packets - static_cast<int64_t>(trace.truth.size());
    bool pass = exact && clean_ok && trace.pcap.records.size() >= 1000 &&
                elapsed < kAnalyzeTimeBudget;
    std::ostringstream d;
    d << trace.pcap.records.size() << " packets, " << trace.truth.size()
      << " injected violations, " << (exact ? "exact match" : "MISMATCH") << ", "
      << (clean_ok ? "0 false positives" : "false positives present") << ", " << std::fixed
      << elapsed << "s";
    return {pass, d.str()};
}

// --- check 8: never-crash fuzzing ---------------------------------------------

constexpr int64_t kCrashParses = 1000000;
constexpr double kPerParseBudget = 0.010;  // seconds

Outcome check_never_crash() {
    Bundle guarded = must_load("openflow10");
    Bundle structural = must_load("openflow10_struct");
    Engine guarded_eng(guarded.compiled.typed, guarded.compiled.ir);
    Engine structural_eng(structural.compiled.typed, structural.compiled.ir);

    std::vector<std::pair<const Engine*, std::string>> targets;
    for (const auto& t : plain_types(guarded.compiled.typed)) targets.push_back({&guarded_eng, t});
    for (const auto& t : plain_types(structural.compiled.typed))
        targets.push_back({&structural_eng, t});

    std::mt19937_64 rng(0x5EED0008);
    int64_t outcomes[5] = {0, 0, 0, 0, 0};  // accepted + the four fault kinds
    double worst = 0.0;
    for (int64_t i = 0; i < kCrashParses; ++i) {
        const auto& [eng, type] = targets[static_cast<size_t>(i) % targets.size()];
        std::vector<uint8_t> bytes = random_bytes(rng, static_cast<size_t>(rng() % 64));

        auto t0 = Clock::now();
        auto out = eng->from_view(type, View(Buffer(bytes)));
        double dt = seconds_since(t0);
        worst = std::max(worst, dt);

        if (out.ok()) {
            ++outcomes[0];
        } else {
            ++outcomes[1 + static_cast<int>(out.violation->kind)];
        }
    }

    int64_t classified = outcomes[0] + outcomes[1] + outcomes[2] + outcomes[3] + outcomes[4];
    bool pass = classified == kCrashParses && worst < kPerParseBudget;
    std::ostringstream d;
    char worst_ms[32];
    std::snprintf(worst_ms, sizeof(worst_ms), "%.3f", worst * 1000.0);
    d << kCrashParses << " parses, all classified (" << outcomes[0] << " accepted, "
      << outcomes[1] << " overflow, " << outcomes[2] << " underflow, " << outcomes[3]
      << " invalid-variant, " << outcomes[4] << " semantic), worst parse " << worst_ms << " ms";
    return {pass, d.str()};
}

}  // namespace

int main() {
    struct Check {
        const char* name;
        Outcome (*fn)();
    };
    const Check checks[] = {
        {"header domain enforcement", check_header_domain},
        {"structural failure modes", check_structural_kinds},
        {"guard optimization", check_guard_optimization},
        {"semantics preservation", check_differential_fuzz},
        {"verifier mutation suite", check_mutation_suite},
        {"round-trip law", check_round_trip},
        {"analyzer exactness", check_analyzer_exactness},
        {"never-crash fuzzing", check_never_crash},
    };

    int failed = 0;
    int index = 0;
    for (const Check& c : checks) {
        ++index;
        Outcome o = c.fn();
        if (!o.pass) ++failed;
        std::printf("[%d/8] %s %s: %s\n", index, o.pass ? "PASS" : "FAIL", c.name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    if (failed > 0) std::printf("%d of 8 checks failed\n", failed);
    return failed == 0 ? 0 : 1;
}
