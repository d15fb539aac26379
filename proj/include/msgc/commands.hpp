#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace msgc {

constexpr int kExitOk = 0;
constexpr int kExitCompileFailure = 1;
constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;

struct CompileArgs {
    std::vector<std::string> files;
    bool dump_ir = false;
    bool dump_csg = false;
    bool no_optimize = false;
};

struct AnalyzeArgs {
    std::string pcap_path;
    std::string bundle;
    std::string json_path;  // empty: text report only
    int workers = 1;
};

struct GenArgs {
    std::string out_path;
    std::string plan_path;
    std::optional<uint64_t> seed;  // overrides the plan's seed when set
    std::string truth_path;        // empty: out_path + ".truth.json"
};

struct FuzzArgs {
    std::string bundle;
    int64_t iterations = 10000;
    uint64_t seed = 1;
};

int cmd_compile(const CompileArgs& args, std::ostream& out, std::ostream& err);
int cmd_analyze(const AnalyzeArgs& args, std::ostream& out, std::ostream& err);
int cmd_gen(const GenArgs& args, std::ostream& out, std::ostream& err);
int cmd_fuzz(const FuzzArgs& args, std::ostream& out, std::ostream& err);

/// Parse argv (program name included) and dispatch to one subcommand.
/// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace msgc
