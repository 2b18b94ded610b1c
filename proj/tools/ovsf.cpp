// ovsf: replay traces, render situations, run the exhaustive verifier, generate workloads.
//
// Exit status: 0 all checks passed, 1 invariant or audit failure, 2 usage or input error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ovsf/exhaustive.hpp"
#include "ovsf/run.hpp"
#include "ovsf/snapshot.hpp"
#include "ovsf/workloads.hpp"

namespace {

using namespace ovsf;
using nlohmann::json;

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;

Expected<std::string> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return make_error(ErrorCode::parse_error, "cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Expected<Trace> load_trace(const std::string& path) {
    auto text = slurp(path);
    if (!text) return text.error();
    auto trace = parse_trace(*text);
    if (!trace) return make_error(trace.error().code, path + ": " + trace.error().message);
    return trace;
}

int input_error(const Error& e) {
    std::cerr << "error: " << e.message << "\n";
    return kInput;
}

json place_json(const Place& p) { return {{"size", p.size()}, {"start", p.start}}; }

json log_json(std::size_t k, const MoveLog& log, const Settlement* s) {
    json moved = json::array();
    for (const auto& m : log.moved) {
        moved.push_back({{"id", to_underlying(m.id)}, {"from", m.from.start}, {"to", m.to.start}, {"size", m.to.size()}});
    }
    json out = {{"req", k}, {"moved", moved}, {"iters", log.iterations}};
    out["placed"] = log.placed ? json{{"id", to_underlying(log.placed->id)}, {"size", log.placed->to.size()},
                                      {"start", log.placed->to.start}}
                               : json(nullptr);
    if (log.removed) out["removed"] = place_json(log.removed->place());
    if (s) {
        out["injected"] = s->injected;
        out["consumed"] = s->consumed;
        out["balance"] = s->balance;
        out["p4"] = s->p4_ok ? "ok" : "fail";
    }
    return out;
}

json stats_json(const RunStats& s, bool with_time) {
    json out = {{"m", s.m},
                {"inserts", s.inserts},
                {"deletes", s.deletes},
                {"total_moves", s.total_moves},
                {"mean_moves", s.mean_moves()},
                {"max_moves", s.max_moves},
                {"max_insert_moves", s.max_insert_moves},
                {"total_delete_iterations", s.total_delete_iterations},
                {"coins_injected", s.coins_injected},
                {"coins_consumed", s.coins_consumed},
                {"coin_balance", s.coin_balance},
                {"max_coins_injected_per_request", s.max_coins_injected_per_request},
                {"p4_failures", s.p4_failures},
                {"budget_failures", s.budget_failures}};
    if (with_time) out["wall_time_ms"] = s.wall_time_ms;
    return out;
}

struct RunArgs {
    std::string trace;
    std::string allocator = "paper";
    bool count_relabel = false;
    bool no_validate = false;
    bool no_audit = false;
    std::uint64_t budget = 4;
    std::string format = "text";
    bool log = false;
    bool time = false;
};

int cmd_run(const RunArgs& a) {
    auto trace = load_trace(a.trace);
    if (!trace) return input_error(trace.error());

    RunOptions options;
    options.validate_each_step = !a.no_validate;
    options.audit = !a.no_audit;
    options.keep_log = a.log;
    options.allocator.count_relabel = a.count_relabel;
    options.coins = CoinOptions{a.budget, a.budget};
    const RunResult result =
        a.allocator == "paper" ? replay<PaperAllocator>(*trace, options) : replay<BaselineAllocator>(*trace, options);

    const bool jsonl = a.format == "jsonl";
    for (std::size_t k = 0; k < result.logs.size(); ++k) {
        const Settlement* s = k < result.settlements.size() ? &result.settlements[k] : nullptr;
        if (jsonl) {
            std::cout << log_json(k + 1, result.logs[k], s).dump() << "\n";
        } else {
            std::cout << format_move_log(k + 1, result.logs[k]) << "\n";
            if (s) std::cout << s->line() << "\n";
        }
    }
    if (jsonl) {
        json line = {{"allocator", a.allocator}, {"stats", stats_json(result.stats, a.time)}};
        if (result.failure) line["failure"] = {{"request", result.failure->request}, {"what", result.failure->what}};
        std::cout << line.dump() << "\n";
    } else {
        std::cout << "stat.allocator=" << a.allocator << "\n" << format_stats(result.stats, a.time);
    }
    if (result.failure) {
        std::cerr << "failure at request " << result.failure->request << ": " << result.failure->what << "\n";
        return kFail;
    }
    return kPass;
}

struct VerifyArgs {
    Level n = 4;
    int depth = 6;
    int max_depth = 8;
    unsigned threads = 1;
    std::string mutate = "none";
    std::uint64_t budget = 4;
    std::string format = "text";
};

int cmd_verify(const VerifyArgs& a) {
    ExhaustiveOptions options;
    options.height = a.n;
    options.depth = a.depth;
    options.max_depth = std::max(a.depth, a.max_depth);
    options.threads = a.threads;
    options.coins = CoinOptions{a.budget, a.budget};
    options.allocator.skip_delete_swap = a.mutate == "swap";
    options.allocator.skip_insert_rename = a.mutate == "rename";
    const ExhaustiveReport report = exhaustive_verify(options);

    if (a.format == "jsonl") {
        json coverage;
        for (std::size_t b = 0; b < kBranchCount; ++b) coverage[to_string(static_cast<Branch>(b))] = report.coverage[b];
        json out = {{"n", report.height},          {"depth", report.depth},
                    {"sequences", report.sequences}, {"steps", report.steps},
                    {"failures", report.failures},   {"coverage", coverage},
                    {"covered", report.covered()},   {"max_insert_moves", report.max_insert_moves},
                    {"max_injected", report.max_injected},
                    {"virtual_p3_breaches", report.virtual_p3_breaches}};
        if (report.first_failure) {
            out["counterexample"] = {{"property", report.first_failure->property},
                                     {"detail", report.first_failure->detail},
                                     {"trace", serialize_trace(report.first_failure->trace)}};
        }
        std::cout << out.dump() << "\n";
    } else {
        std::cout << format_report(report);
        std::cout << "covered=" << (report.covered() ? "yes" : "no") << "\n";
    }
    return report.passed() ? kPass : kFail;
}

struct RenderArgs {
    std::string snapshot;
    std::string trace;
    std::size_t step = 0;
    std::string allocator = "paper";
};

int cmd_render(const RenderArgs& a) {
    if (a.snapshot.empty() == a.trace.empty()) {
        std::cerr << "error: give either a snapshot or --trace\n";
        return kInput;
    }
    if (!a.snapshot.empty()) {
        auto text = slurp(a.snapshot);
        if (!text) return input_error(text.error());
        auto s = parse_snapshot(*text);
        if (!s) return input_error(s.error());
        auto diagram = render(*s);
        if (!diagram) return input_error(diagram.error());
        std::cout << *diagram << "\n";
        return kPass;
    }
    auto trace = load_trace(a.trace);
    if (!trace) return input_error(trace.error());
    if (a.step > trace->requests.size()) {
        std::cerr << "error: --step " << a.step << " exceeds trace length " << trace->requests.size() << "\n";
        return kInput;
    }
    trace->requests.resize(a.step);
    RunOptions options;
    options.audit = false;
    const RunResult result =
        a.allocator == "paper" ? replay<PaperAllocator>(*trace, options) : replay<BaselineAllocator>(*trace, options);
    if (result.failure) {
        std::cerr << "failure at request " << result.failure->request << ": " << result.failure->what << "\n";
        return kFail;
    }
    std::cout << render_unchecked(result.final_situation) << "\n";
    return kPass;
}

struct GenArgs {
    Level n = 8;
    std::size_t m = 1000;
    std::uint64_t seed = 1;
    double ratio = 0.5;
    bool by_id = false;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OVSF code allocator: replay, verify, render, generate"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Replay a trace and print statistics");
    run_cmd->add_option("trace", run.trace, "Trace file")->required();
    run_cmd->add_option("--allocator", run.allocator, "paper or baseline")->check(CLI::IsMember({"paper", "baseline"}));
    run_cmd->add_flag("--count-relabel", run.count_relabel, "Count the delete-by-id relabel as a move");
    run_cmd->add_flag("--no-validate", run.no_validate, "Validate only the final situation");
    run_cmd->add_flag("--no-audit", run.no_audit, "Skip the coin ledger");
    run_cmd->add_option("--budget", run.budget, "Coin injection cap per request");
    run_cmd->add_option("--format", run.format, "text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));
    run_cmd->add_flag("--log", run.log, "Print one line per request");
    run_cmd->add_flag("--time", run.time, "Include wall time in the statistics");

    VerifyArgs verify;
    auto* verify_cmd = app.add_subcommand("verify", "Exhaustively check all request sequences on a small tree");
    verify_cmd->add_option("--n", verify.n, "Tree height")->check(CLI::Range(0, 6));
    verify_cmd->add_option("--depth", verify.depth, "Sequence length")->check(CLI::Range(0, 10));
    verify_cmd->add_option("--max-depth", verify.max_depth, "Raise depth up to here while a branch is unhit");
    verify_cmd->add_option("--threads", verify.threads, "Worker threads");
    verify_cmd->add_option("--mutate", verify.mutate, "none, swap or rename")
        ->check(CLI::IsMember({"none", "swap", "rename"}));
    verify_cmd->add_option("--budget", verify.budget, "Coin injection cap per request");
    verify_cmd->add_option("--format", verify.format, "text or jsonl")->check(CLI::IsMember({"text", "jsonl"}));

    RenderArgs render_args;
    auto* render_cmd = app.add_subcommand("render", "Draw a situation as a bracket diagram");
    render_cmd->add_option("snapshot", render_args.snapshot, "Snapshot file");
    render_cmd->add_option("--trace", render_args.trace, "Trace file to replay instead");
    render_cmd->add_option("--step", render_args.step, "Number of requests to replay");
    render_cmd->add_option("--allocator", render_args.allocator, "paper or baseline")
        ->check(CLI::IsMember({"paper", "baseline"}));

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a generated trace to stdout");
    gen_cmd->require_subcommand(1);
    auto* random_cmd = gen_cmd->add_subcommand("random", "Random admissible trace");
    random_cmd->add_option("--n", gen.n, "Tree height")->check(CLI::Range(0, static_cast<int>(kMaxHeight)));
    random_cmd->add_option("--m", gen.m, "Number of requests");
    random_cmd->add_option("--seed", gen.seed, "Generator seed");
    random_cmd->add_option("--ratio", gen.ratio, "Insert probability")->check(CLI::Range(0.0, 1.0));
    random_cmd->add_flag("--by-id", gen.by_id, "Delete by pebble id");
    auto* cascade_cmd = gen_cmd->add_subcommand("cascade", "Trace that forces cascades in the sorted baseline");
    cascade_cmd->add_option("--n", gen.n, "Tree height")->check(CLI::Range(0, static_cast<int>(kMaxHeight)));
    cascade_cmd->add_option("--m", gen.m, "Number of requests");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kInput;
    }

    if (*run_cmd) return cmd_run(run);
    if (*verify_cmd) return cmd_verify(verify);
    if (*render_cmd) return cmd_render(render_args);
    if (*random_cmd) {
        std::cout << serialize_trace(gen_random_trace(RandomTraceOptions{gen.n, gen.m, gen.seed, gen.ratio, gen.by_id}));
        return kPass;
    }
    if (*cascade_cmd) {
        std::cout << serialize_trace(gen_cascade_trace(gen.n, gen.m));
        return kPass;
    }
    return kInput;
}
