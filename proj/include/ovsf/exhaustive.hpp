#pragma once

#include <array>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovsf/allocator.hpp"
#include "ovsf/coins.hpp"
#include "ovsf/properties.hpp"
#include "ovsf/trace.hpp"

namespace ovsf {

enum class Branch {
    insert_no_left_neighbor,
    insert_left_black,
    insert_white_small_left,
    insert_rotation,
    insert_shuffle_white_close,
    insert_shuffle_black_close,
    insert_renamed,
    delete_smaller_than_gap,
    delete_at_least_gap,
    delete_swap,
    delete_exit_no_pebbles_right,
    delete_exit_does_not_fit,
};

inline constexpr std::size_t kBranchCount = 12;

inline const char* to_string(Branch b) {
    switch (b) {
        case Branch::insert_no_left_neighbor: return "insert.no_left_neighbor";
        case Branch::insert_left_black: return "insert.left_black";
        case Branch::insert_white_small_left: return "insert.white_small_left";
        case Branch::insert_rotation: return "insert.rotation";
        case Branch::insert_shuffle_white_close: return "insert.shuffle_white_close";
        case Branch::insert_shuffle_black_close: return "insert.shuffle_black_close";
        case Branch::insert_renamed: return "insert.renamed";
        case Branch::delete_smaller_than_gap: return "delete.smaller_than_gap";
        case Branch::delete_at_least_gap: return "delete.at_least_gap";
        case Branch::delete_swap: return "delete.swap";
        case Branch::delete_exit_no_pebbles_right: return "delete.exit_no_pebbles_right";
        case Branch::delete_exit_does_not_fit: return "delete.exit_does_not_fit";
    }
    return "?";
}

struct ExhaustiveOptions {
    Level height = 2;
    int depth = 4;
    int max_depth = 8;  // depth is raised up to here while some branch stays unhit
    AllocatorOptions allocator;
    CoinOptions coins;
    unsigned threads = 1;
};

struct Counterexample {
    Trace trace;
    std::string property;
    std::string detail;
};

struct ExhaustiveReport {
    Level height = 0;
    int depth = 0;
    std::size_t sequences = 0;  // request sequences of full length (or dead ends)
    std::size_t steps = 0;      // requests replayed
    std::size_t failures = 0;
    std::optional<Counterexample> first_failure;
    std::array<std::size_t, kBranchCount> coverage{};
    std::size_t max_insert_moves = 0;
    std::uint64_t max_injected = 0;
    std::size_t virtual_p3_breaches = 0;  // P3 breaks on a mid-deletion state; final states are checked separately

    bool passed() const { return failures == 0; }

    std::vector<Branch> unhit() const {
        std::vector<Branch> out;
        for (std::size_t b = 0; b < kBranchCount; ++b) {
            if (coverage[b] == 0) out.push_back(static_cast<Branch>(b));
        }
        return out;
    }
    bool covered() const { return unhit().empty(); }

    void merge(const ExhaustiveReport& other) {
        sequences += other.sequences;
        steps += other.steps;
        failures += other.failures;
        if (!first_failure && other.first_failure) first_failure = other.first_failure;
        for (std::size_t b = 0; b < kBranchCount; ++b) coverage[b] += other.coverage[b];
        max_insert_moves = std::max(max_insert_moves, other.max_insert_moves);
        max_injected = std::max(max_injected, other.max_injected);
        virtual_p3_breaches += other.virtual_p3_breaches;
    }
};

namespace detail {

/// Admissible next requests: inserts that fit, deletions of populated levels.
inline std::vector<Request> next_requests(const Situation& s) {
    std::vector<Request> out;
    for (Level l = 0; l <= s.height(); ++l) {
        if (s.free_bandwidth() >= size_of(l)) out.push_back(Request::insert(l));
    }
    for (Level l = 0; l <= s.height(); ++l) {
        if (s.count_of_level(l) > 0) out.push_back(Request::remove(l));
    }
    return out;
}

class Explorer {
public:
    Explorer(const ExhaustiveOptions& options, int depth) : options_(options), depth_(depth) {
        report_.height = options.height;
        report_.depth = depth;
    }

    void explore(const Situation& s, const CoinLedger& ledger, std::vector<Request>& path) {
        if (static_cast<int>(path.size()) == depth_) {
            ++report_.sequences;
            return;
        }
        const auto next = next_requests(s);
        if (next.empty()) {
            ++report_.sequences;
            return;
        }
        for (const auto& r : next) {
            Situation after = s;
            CoinLedger book = ledger;
            path.push_back(r);
            if (step(s, after, book, r, path)) explore(after, book, path);
            path.pop_back();
        }
    }

    /// Applies `r` to `after` (a copy of `before`) and runs every check. False stops descent.
    bool step(const Situation& before, Situation& after, CoinLedger& ledger, const Request& r,
              const std::vector<Request>& path) {
        ++report_.steps;
        const std::size_t failures_before = report_.failures;
        auto fail = [&](const std::string& property, const std::string& text) {
            ++report_.failures;
            if (!report_.first_failure) {
                report_.first_failure = Counterexample{Trace{options_.height, path}, property, text};
            }
        };

        std::optional<Position> last_gap;
        auto observe = [&](const Situation& gamma, Position i, Level a) {
            if (last_gap && i <= *last_gap) fail("delete_progress", "gap did not move right");
            if (last_gap) {
                for (const auto& p : gamma) {
                    if (p.start > i && p.level < a) {
                        fail("delete_right_at_least_gap", detail::at(p) + " right of " + std::to_string(i));
                        break;
                    }
                }
            }
            last_gap = i;
            // The gap with its virtual pebble keeps P1 and P2. P3 may break there (a white pebble
            // between two equal black ones, the right one virtual), so it is only counted.
            Situation with_virtual = gamma;
            if (!with_virtual.place(a, i)) {
                fail("delete_virtual_p1_p2", "gap " + std::to_string(size_of(a)) + "@" + std::to_string(i) + " is not free");
                return;
            }
            for (const auto& v : validate(with_virtual)) {
                if (v.kind == ViolationKind::p3) {
                    ++report_.virtual_p3_breaches;
                } else {
                    fail("delete_virtual_p1_p2", v.describe());
                }
            }
        };

        Expected<MoveLog> log = r.kind == RequestKind::insert
                                    ? insert_in_place(after, r.level, options_.allocator)
                                    : delete_last_observed(after, r.level, options_.allocator, observe);
        if (!log) {
            fail("allocator_error", log.error().message);
            return false;
        }
        record(*log);

        if (log->kind == RequestKind::insert) {
            report_.max_insert_moves = std::max(report_.max_insert_moves, log->moved.size());
            if (log->moved.size() > 3) fail("insert_moves", std::to_string(log->moved.size()) + " moves");
            if (log->iterations != 0) fail("insert_moves", "insert reports loop iterations");
            const bool direct = log->insert_case == InsertCase::no_left_neighbor ||
                                log->insert_case == InsertCase::left_black;
            if (direct && !log->moved.empty()) fail("insert_direct_no_moves", "direct placement moved pebbles");
            if (after.size() != before.size() + 1 || after.count_of_level(r.level) != before.count_of_level(r.level) + 1) {
                fail("insert_adds_one", "pebble count");
            }
        } else if (after.size() + 1 != before.size() ||
                   after.count_of_level(r.level) + 1 != before.count_of_level(r.level)) {
            fail("delete_removes_one", "pebble count");
        }

        for (auto& f : check_situation(after)) fail(f.property, f.detail);

        const Settlement st = ledger.settle(after, *log);
        report_.max_injected = std::max(report_.max_injected, st.injected);
        if (!st.p4_ok) fail("p4", st.problems.front().describe());
        if (!st.within_budget) fail("coin_budget", std::to_string(st.injected) + " coins injected");
        if (ledger.injected_total() - ledger.consumed_total() != ledger.balance()) {
            fail("coin_conservation", st.line());
        }
        return report_.failures == failures_before;
    }

    ExhaustiveReport& report() { return report_; }

private:
    void hit(Branch b) { ++report_.coverage[static_cast<std::size_t>(b)]; }

    void record(const MoveLog& log) {
        if (log.kind == RequestKind::insert) {
            switch (*log.insert_case) {
                case InsertCase::no_left_neighbor: hit(Branch::insert_no_left_neighbor); break;
                case InsertCase::left_black: hit(Branch::insert_left_black); break;
                case InsertCase::white_small_left: hit(Branch::insert_white_small_left); break;
                case InsertCase::rotation: hit(Branch::insert_rotation); break;
                case InsertCase::shuffle_white_close: hit(Branch::insert_shuffle_white_close); break;
                case InsertCase::shuffle_black_close: hit(Branch::insert_shuffle_black_close); break;
            }
            if (log.renamed) hit(Branch::insert_renamed);
            return;
        }
        for (const auto& st : log.steps) {
            hit(st.moved_level < st.gap_level ? Branch::delete_smaller_than_gap : Branch::delete_at_least_gap);
            if (st.swapped) hit(Branch::delete_swap);
        }
        if (log.exit) {
            hit(*log.exit == DeleteExit::no_pebbles_right ? Branch::delete_exit_no_pebbles_right
                                                          : Branch::delete_exit_does_not_fit);
        }
    }

    const ExhaustiveOptions& options_;
    int depth_;
    ExhaustiveReport report_;
};

inline ExhaustiveReport explore_once(const ExhaustiveOptions& options, int depth) {
    const Situation empty(options.height);
    const CoinLedger ledger(options.coins);
    const auto first = next_requests(empty);
    if (options.threads <= 1 || depth == 0) {
        Explorer ex(options, depth);
        std::vector<Request> path;
        ex.explore(empty, ledger, path);
        return std::move(ex.report());
    }
    // One task per first request; reports are merged in request order so the outcome does not
    // depend on scheduling.
    std::vector<std::future<ExhaustiveReport>> tasks;
    for (const auto& r : first) {
        tasks.push_back(std::async(std::launch::async, [&options, depth, &empty, &ledger, r] {
            Explorer ex(options, depth);
            Situation after = empty;
            CoinLedger book = ledger;
            std::vector<Request> path{r};
            if (ex.step(empty, after, book, r, path)) ex.explore(after, book, path);
            return std::move(ex.report());
        }));
    }
    ExhaustiveReport out;
    out.height = options.height;
    out.depth = depth;
    for (auto& t : tasks) out.merge(t.get());
    return out;
}

}  // namespace detail

/// Replays every admissible request sequence up to `options.depth` from the empty situation and
/// checks validity, the structural properties, the insert move bound and the coin audit after
/// every request. While a branch stays unhit the depth is raised, up to `options.max_depth`.
inline ExhaustiveReport exhaustive_verify(const ExhaustiveOptions& options) {
    ExhaustiveReport report = detail::explore_once(options, options.depth);
    for (int depth = options.depth + 1; report.passed() && !report.covered() && depth <= options.max_depth; ++depth) {
        report = detail::explore_once(options, depth);
    }
    return report;
}

inline std::string format_report(const ExhaustiveReport& r) {
    std::string out = "verify n=" + std::to_string(r.height) + " depth=" + std::to_string(r.depth) +
                      " sequences=" + std::to_string(r.sequences) + " steps=" + std::to_string(r.steps) +
                      " failures=" + std::to_string(r.failures) + "\n";
    for (std::size_t b = 0; b < kBranchCount; ++b) {
        out += "branch." + std::string(to_string(static_cast<Branch>(b))) + "=" + std::to_string(r.coverage[b]) + "\n";
    }
    out += "max_insert_moves=" + std::to_string(r.max_insert_moves) + "\n";
    out += "max_injected=" + std::to_string(r.max_injected) + "\n";
    out += "virtual_p3_breaches=" + std::to_string(r.virtual_p3_breaches) + "\n";
    if (r.first_failure) {
        out += "counterexample property=" + r.first_failure->property + " detail=" + r.first_failure->detail + "\n";
        out += serialize_trace(r.first_failure->trace);
    }
    return out;
}

}  // namespace ovsf
