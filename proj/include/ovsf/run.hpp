#pragma once

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "ovsf/allocator.hpp"
#include "ovsf/baseline.hpp"
#include "ovsf/coins.hpp"
#include "ovsf/trace.hpp"

namespace ovsf {

struct RunStats {
    std::size_t m = 0;
    std::size_t inserts = 0;
    std::size_t deletes = 0;
    std::size_t total_moves = 0;
    std::size_t max_moves = 0;
    std::size_t max_insert_moves = 0;
    std::size_t total_delete_iterations = 0;
    std::uint64_t coins_injected = 0;
    std::uint64_t coins_consumed = 0;
    std::uint64_t coin_balance = 0;
    std::uint64_t max_coins_injected_per_request = 0;
    std::size_t p4_failures = 0;
    std::size_t budget_failures = 0;
    double wall_time_ms = 0.0;

    double mean_moves() const { return m == 0 ? 0.0 : static_cast<double>(total_moves) / static_cast<double>(m); }
};

struct RunOptions {
    bool validate_each_step = true;
    bool audit = true;     // coin ledger; only meaningful for the paper allocator
    bool keep_log = false;  // collect one text line per request
    AllocatorOptions allocator;
    CoinOptions coins;
};

struct RunFailure {
    std::size_t request = 0;  // 1-based; 0 when the final check failed
    std::string what;
};

struct RunResult {
    RunStats stats;
    std::vector<MoveLog> logs;            // filled when keep_log is set
    std::vector<Settlement> settlements;  // filled when keep_log is set and auditing
    std::optional<RunFailure> failure;
    Situation final_situation{0};
};

inline std::string format_place(const Place& p) { return std::to_string(p.size()) + "@" + std::to_string(p.start); }

/// `req=<k> placed=<id>:<size>@<start> moved=<id>:<from>-><to>,... iters=<t>`; `placed=-` for deletions.
inline std::string format_move_log(std::size_t k, const MoveLog& log) {
    std::string out = "req=" + std::to_string(k) + " placed=";
    if (log.placed) {
        out += std::to_string(to_underlying(log.placed->id)) + ":" + format_place(log.placed->to);
    } else {
        out += "-";
    }
    out += " moved=";
    for (std::size_t i = 0; i < log.moved.size(); ++i) {
        const Move& mv = log.moved[i];
        if (i > 0) out += ",";
        out += std::to_string(to_underlying(mv.id)) + ":" + std::to_string(mv.from.start) + "->" +
               std::to_string(mv.to.start);
    }
    out += " iters=" + std::to_string(log.iterations);
    return out;
}

inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

/// `stat.<name>=<value>` lines in fixed order. Wall time is left out unless asked for, so the
/// output is byte-stable for a fixed input.
inline std::string format_stats(const RunStats& s, bool with_time = false) {
    std::string out;
    auto line = [&](const char* name, const std::string& value) {
        out += "stat.";
        out += name;
        out += "=" + value + "\n";
    };
    line("m", std::to_string(s.m));
    line("inserts", std::to_string(s.inserts));
    line("deletes", std::to_string(s.deletes));
    line("total_moves", std::to_string(s.total_moves));
    line("mean_moves", format_number(s.mean_moves()));
    line("max_moves", std::to_string(s.max_moves));
    line("max_insert_moves", std::to_string(s.max_insert_moves));
    line("total_delete_iterations", std::to_string(s.total_delete_iterations));
    line("coins_injected", std::to_string(s.coins_injected));
    line("coins_consumed", std::to_string(s.coins_consumed));
    line("coin_balance", std::to_string(s.coin_balance));
    line("max_coins_injected_per_request", std::to_string(s.max_coins_injected_per_request));
    line("p4_failures", std::to_string(s.p4_failures));
    line("budget_failures", std::to_string(s.budget_failures));
    if (with_time) line("wall_time_ms", format_number(s.wall_time_ms));
    return out;
}

namespace detail {

inline std::optional<std::string> check_after_step(const PaperAllocator& a) {
    auto v = validate(a.situation());
    if (!v.empty()) return v.front().describe();
    return std::nullopt;
}

inline std::optional<std::string> check_after_step(const BaselineAllocator& a) {
    if (!is_sorted_compact(a.situation())) return std::string("layout is not sorted-compact");
    return std::nullopt;
}

}  // namespace detail

/// Replays a trace through `Allocator`, collecting statistics. Stops at the first rejected
/// request or failed check; the failure cites the 1-based request index.
template <typename Allocator>
RunResult replay(const Trace& trace, const RunOptions& options = {}) {
    constexpr bool paper = std::is_same_v<Allocator, PaperAllocator>;
    const auto started = std::chrono::steady_clock::now();
    Allocator alloc(trace.height, options.allocator);
    CoinLedger ledger(options.coins);
    RunResult result;
    RunStats& st = result.stats;
    const bool audit = paper && options.audit;

    for (std::size_t k = 0; k < trace.requests.size(); ++k) {
        const Request& r = trace.requests[k];
        auto log = alloc.apply(r);
        if (!log) {
            result.failure = RunFailure{k + 1, log.error().message};
            break;
        }
        ++st.m;
        (r.kind == RequestKind::insert ? st.inserts : st.deletes) += 1;
        st.total_moves += log->cost();
        st.max_moves = std::max(st.max_moves, log->cost());
        if (r.kind == RequestKind::insert) st.max_insert_moves = std::max(st.max_insert_moves, log->cost());
        st.total_delete_iterations += log->iterations;

        if (options.validate_each_step) {
            if (auto why = detail::check_after_step(alloc); why) {
                result.failure = RunFailure{k + 1, "invalid situation: " + *why};
            }
        }
        if (audit) {
            Settlement s = ledger.settle(alloc.situation(), *log);
            st.max_coins_injected_per_request = std::max(st.max_coins_injected_per_request, s.injected);
            if (!s.p4_ok) {
                ++st.p4_failures;
                if (!result.failure) result.failure = RunFailure{k + 1, "coin audit: " + s.problems.front().describe()};
            }
            if (!s.within_budget) {
                ++st.budget_failures;
                if (!result.failure) {
                    result.failure = RunFailure{k + 1, "coin budget exceeded: " + std::to_string(s.injected) + " injected"};
                }
            }
            if (options.keep_log) result.settlements.push_back(std::move(s));
        }
        if (options.keep_log) result.logs.push_back(std::move(*log));
        if (result.failure) break;
    }

    if (!result.failure && !options.validate_each_step) {
        if (auto why = detail::check_after_step(alloc); why) result.failure = RunFailure{0, "invalid final situation: " + *why};
    }
    if (audit) {
        st.coins_injected = ledger.injected_total();
        st.coins_consumed = ledger.consumed_total();
        st.coin_balance = ledger.balance();
    }
    result.final_situation = alloc.situation();
    st.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return result;
}

}  // namespace ovsf
