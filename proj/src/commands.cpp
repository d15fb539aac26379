#include "msgc/commands.hpp"

#include <random>

#include <CLI11.hpp>

#include "msgc/analyzer.hpp"
#include "msgc/compile.hpp"
#include "msgc/engine.hpp"
#include "msgc/pcap.hpp"
#include "msgc/protocols.hpp"
#include "msgc/trace_gen.hpp"
#include "msgc/value.hpp"

namespace msgc {

namespace {

std::string base_name(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

}  // namespace

int cmd_compile(const CompileArgs& args, std::ostream& out, std::ostream& err) {
    std::vector<SourceFile> sources;
    for (const auto& path : args.files) {
        std::string reason;
        auto text = read_text_file(path, reason);
        if (!text.has_value()) {
            err << reason << "\n";
            return kExitIo;
        }
        sources.push_back({base_name(path), std::move(*text)});
    }

    CompileOptions opts;
    opts.optimize = !args.no_optimize;
    auto compiled = compile_sources(sources, opts);
    if (!compiled.ok()) {
        err << render(compiled.error());
        return kExitCompileFailure;
    }
    const CompiledModule& cm = compiled.value();
    if (!cm.typed.warnings.empty()) err << render(cm.typed.warnings);

    out << "ok: " << cm.typed.order.size() << " definitions, " << cm.ir.ops.size()
        << " operations";
    if (opts.optimize) {
        out << ", static guards " << cm.stats.guards_before << " -> " << cm.stats.guards_after;
    }
    out << "\n";
    if (args.dump_ir) out << dump(cm.ir);
    if (args.dump_csg) out << cm.csg.dump();
    return kExitOk;
}

int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err) {
    auto bundle = load_bundle(args.bundle);
    if (!bundle.ok()) {
        err << render(bundle.error());
        return kExitCompileFailure;
    }
    auto capture = read_pcap(args.pcap_path);
    if (!capture.ok()) {
        err << capture.error() << "\n";
        return kExitIo;
    }
    AnalyzeOptions opts;
    opts.workers = args.workers;
    auto report = analyze(capture.value(), bundle.value(), opts);
    if (!report.ok()) {
        err << report.error() << "\n";
        return kExitIo;
    }
    out << report.value().to_text();
    if (!args.json_path.empty()) {
        auto w = write_text_file(args.json_path, report.value().to_json());
        if (!w.ok()) {
            err << w.error() << "\n";
            return kExitIo;
        }
    }
    return kExitOk;
}

int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err) {
    std::string reason;
    auto text = read_text_file(args.plan_path, reason);
    if (!text.has_value()) {
        err << reason << "\n";
        return kExitIo;
    }
    auto plan = parse_plan(*text);
    if (!plan.ok()) {
        err << plan.error() << "\n";
        return kExitIo;
    }
    if (args.seed.has_value()) plan.value().seed = *args.seed;

    GeneratedTrace trace = generate_trace(plan.value());
    auto w = write_pcap(args.out_path, trace.pcap);
    if (!w.ok()) {
        err << w.error() << "\n";
        return kExitIo;
    }
    std::string truth_path =
        args.truth_path.empty() ? args.out_path + ".truth.json" : args.truth_path;
    auto t = write_text_file(truth_path, truth_json(trace));
    if (!t.ok()) {
        err << t.error() << "\n";
        return kExitIo;
    }
    out << "wrote " << trace.pcap.records.size() << " packets to " << args.out_path << " ("
        << trace.truth.size() << " injected violations, truth in " << truth_path << ")\n";
    return kExitOk;
}

namespace {

/// Differential run of one buffer through the as-synthesized and shipped
/// instruction streams. Only one drift is tolerated: a fused guard covers a
/// whole constant span at once, so a buffer that is both short and
/// value-invalid can fail structurally before any value check runs.
struct DiffResult {
    bool mismatch = false;
    std::string why;
    int64_t guards_raw = 0;
    int64_t guards_opt = 0;
};

DiffResult diff_one(Engine& raw, Engine& opt, const std::string& type, const Buffer& buf) {
    DiffResult r;
    auto a = raw.from_view(type, View(buf));
    auto o = opt.from_view(type, View(buf));
    r.guards_raw = a.stats.guard_checks;
    r.guards_opt = o.stats.guard_checks;

    if (a.ok() != o.ok()) {
        r.mismatch = true;
        r.why = "verdict";
    } else if (a.ok()) {
        if (!equal_values(*a.value, *o.value)) {
            r.mismatch = true;
            r.why = "value";
        } else if (a.consumed_bits != o.consumed_bits) {
            r.mismatch = true;
            r.why = "consumed length";
        }
    } else if (a.violation->kind != o.violation->kind &&
               !(a.violation->kind == FailKind::Semantic &&
                 o.violation->kind == FailKind::Overflow)) {
        r.mismatch = true;
        r.why = "failure kind";
    }
    if (!r.mismatch && r.guards_opt > r.guards_raw) {
        r.mismatch = true;
        r.why = "guard execution count";
    }
    return r;
}

}  // namespace

int cmd_fuzz(const FuzzArgs& args, std::ostream& out, std::ostream& err) {
    auto bundle = load_bundle(args.bundle);
    if (!bundle.ok()) {
        err << render(bundle.error());
        return kExitCompileFailure;
    }
    const CompiledModule& cm = bundle.value().compiled;
    Engine raw(cm.typed, cm.raw_ir);
    Engine opt(cm.typed, cm.ir);

    std::vector<std::string> targets;
    for (const auto& name : cm.typed.order) {
        const TypeDef* def = cm.typed.find_type(name);
        if (def != nullptr && def->params.empty()) targets.push_back(name);
    }

    int64_t mismatches = 0;
    int64_t total_raw = 0;
    int64_t total_opt = 0;
    std::mt19937_64 rng(args.seed);
    std::uniform_int_distribution<int> len_dist(0, 95);
    std::uniform_int_distribution<int> byte_dist(0, 255);

    for (const auto& type : targets) {
        int64_t type_mismatches = 0;
        for (int64_t i = 0; i < args.iterations; ++i) {
            int len = len_dist(rng);
            std::vector<uint8_t> bytes(static_cast<size_t>(len));
            for (auto& b : bytes) b = static_cast<uint8_t>(byte_dist(rng));
            Buffer buf(std::move(bytes));

            DiffResult r = diff_one(raw, opt, type, buf);
            total_raw += r.guards_raw;
            total_opt += r.guards_opt;
            if (r.mismatch) {
                ++type_mismatches;
                if (mismatches + type_mismatches <= 5) {
                    err << "mismatch (" << r.why << ") on " << type << ", iteration " << i
                        << "\n";
                }
            }
        }
        mismatches += type_mismatches;
        out << type << ": " << args.iterations << " runs, " << type_mismatches
            << " mismatches\n";
    }

    out << "fuzz " << args.bundle << ": " << targets.size() << " types x " << args.iterations
        << " runs, " << mismatches << " mismatches, guard checks " << total_opt
        << " optimized vs " << total_raw << " unoptimized\n";
    return mismatches == 0 ? kExitOk : kExitMismatch;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"declarative message-format compiler and capture analyzer"};
    app.require_subcommand(1);

    CompileArgs ca;
    auto* compile = app.add_subcommand("compile", "compile spec files and report diagnostics");
    compile->add_option("files", ca.files, "spec files, compiled as one module")
        ->required()
        ->expected(-1);
    compile->add_flag("--dump-ir", ca.dump_ir, "print the shipped instruction stream");
    compile->add_flag("--dump-csg", ca.dump_csg, "print the call graph with node classes");
    compile->add_flag("--no-optimize", ca.no_optimize, "ship the as-synthesized stream");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "replay a capture through a protocol bundle");
    analyze->add_option("pcap", aa.pcap_path, "classic capture file")->required();
    analyze->add_option("--bundle", aa.bundle, "protocol bundle name")->required();
    analyze->add_option("--json", aa.json_path, "also write the JSON report here");
    analyze->add_option("--workers", aa.workers, "packet worker threads")
        ->check(CLI::Range(1, 64));

    GenArgs ga;
    uint64_t seed_value = 0;
    auto* gen = app.add_subcommand("gen", "generate a seeded capture with known violations");
    gen->add_option("out", ga.out_path, "capture file to write")->required();
    gen->add_option("--plan", ga.plan_path, "corpus plan, a flat JSON object")->required();
    auto* seed_opt = gen->add_option("--seed", seed_value, "override the plan's seed");
    gen->add_option("--truth", ga.truth_path, "sidecar path (default: <out>.truth.json)");

    FuzzArgs fa;
    auto* fuzz =
        app.add_subcommand("fuzz", "differential-test the optimized stream against reference");
    fuzz->add_option("--bundle", fa.bundle, "protocol bundle name")->required();
    fuzz->add_option("-n,--iterations", fa.iterations, "buffers per definition")
        ->check(CLI::NonNegativeNumber);
    fuzz->add_option("--seed", fa.seed, "buffer generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitIo;
    }

    if (compile->parsed()) return cmd_compile(ca, out, err);
    if (analyze->parsed()) return cmd_analyze(aa, out, err);
    if (gen->parsed()) {
        if (seed_opt->count() > 0) ga.seed = seed_value;
        return cmd_gen(ga, out, err);
    }
    if (fuzz->parsed()) return cmd_fuzz(fa, out, err);
    return kExitIo;
}

}  // namespace msgc
