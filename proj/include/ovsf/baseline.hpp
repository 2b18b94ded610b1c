#pragma once

#include <string>

#include "ovsf/allocator.hpp"

namespace ovsf {

// Fully sorted allocator: pebbles ordered by size ascending, each level occupying one run that
// starts at the lowest aligned position after the runs of smaller levels.

namespace detail {

/// Position right after the run of `level`, or where that run would start if it were empty.
inline Position run_end(const Situation& s, Level level) {
    if (const Pebble* last = s.rightmost_of_level(level)) return last->end();
    Position lower_end = 0;
    for (Level l = level - 1; l >= 0; --l) {
        if (const Pebble* p = s.rightmost_of_level(l)) {
            lower_end = p->end();
            break;
        }
    }
    return align_up(lower_end, size_of(level));
}

inline Position run_start(const Situation& s, Level level) {
    Position lower_end = 0;
    for (Level l = level - 1; l >= 0; --l) {
        if (const Pebble* p = s.rightmost_of_level(l)) {
            lower_end = p->end();
            break;
        }
    }
    return align_up(lower_end, size_of(level));
}

}  // namespace detail

/// The layout the sorted allocator keeps: one run per level, smallest first, minimal gaps.
inline Situation sorted_layout(const Situation& s) {
    Situation out(s.height());
    std::vector<Pebble> placed;
    Position cursor = 0;
    for (Level l = 0; l <= s.height(); ++l) {
        cursor = align_up(cursor, size_of(l));
        for (const auto& p : s) {
            if (p.level != l) continue;
            placed.push_back({p.id, l, cursor});
            cursor += size_of(l);
        }
    }
    auto built = Situation::from_pebbles(s.height(), placed, Situation::Checking::off);
    return built ? std::move(*built) : out;
}

/// True iff `s` is in sorted-compact form (ignores identities).
inline bool is_sorted_compact(const Situation& s) { return s.same_layout(sorted_layout(s)); }

/// Places the pebble at the end of its level's run; a pebble found there is lifted out and
/// re-inserted the same way one level up the chain.
inline Expected<MoveLog> baseline_insert_in_place(Situation& s, Level level) {
    if (!s.in_range(level)) {
        return make_error(ErrorCode::level_out_of_range, "level " + std::to_string(level) + " exceeds tree height");
    }
    if (s.free_bandwidth() < size_of(level)) {
        return make_error(ErrorCode::insufficient_bandwidth,
                          "free bandwidth " + std::to_string(s.free_bandwidth()) + " < " +
                              std::to_string(size_of(level)));
    }
    MoveLog log;
    log.kind = RequestKind::insert;
    log.level = level;

    detail::Edit edit(s);
    const PebbleId fresh = s.peek_next_id();
    Pebble pending{fresh, level, 0};
    for (;;) {
        const Position at = detail::run_end(s, pending.level);
        const Pebble* occupant = s.first_from(at);
        std::optional<Pebble> displaced;
        if (occupant != nullptr && occupant->start < at + pending.size()) {
            auto lifted = edit.take(occupant->id);
            if (!lifted) return lifted.error();
            displaced = *lifted;
        }
        if (auto st = edit.put(pending, at); !st) return st.error();
        if (!displaced) break;
        pending = *displaced;
    }
    const Pebble* placed = s.find(fresh);
    log.placed = Move{fresh, placed->place(), placed->place()};
    log.moved = edit.moves({fresh});
    edit.commit();
    return log;
}

/// Removes the last pebble of `level`, then pulls every higher run back by one slot where the
/// freed space allows it.
inline Expected<MoveLog> baseline_delete_in_place(Situation& s, Level level) {
    if (!s.in_range(level)) {
        return make_error(ErrorCode::level_out_of_range, "level " + std::to_string(level) + " exceeds tree height");
    }
    const Pebble* last = s.rightmost_of_level(level);
    if (last == nullptr) return make_error(ErrorCode::no_such_level, "no pebble of level " + std::to_string(level));

    MoveLog log;
    log.kind = RequestKind::delete_level;
    log.level = level;

    detail::Edit edit(s);
    auto removed = edit.take(last->id);
    if (!removed) return removed.error();
    log.removed = *removed;

    for (Level l = level + 1; l <= s.height(); ++l) {
        const Pebble* tail = s.rightmost_of_level(l);
        if (tail == nullptr) continue;
        const Position want = detail::run_start(s, l);
        const Pebble* head = s.first_from(want);
        if (head == nullptr || head->start <= want) continue;
        if (auto st = edit.move(tail->id, want); !st) return st.error();
    }
    log.moved = edit.moves({removed->id});
    log.exit = DeleteExit::no_pebbles_right;
    edit.commit();
    return log;
}

inline Expected<MoveLog> baseline_apply_in_place(Situation& s, const Request& r, const AllocatorOptions& options = {}) {
    switch (r.kind) {
        case RequestKind::insert: return baseline_insert_in_place(s, r.level);
        case RequestKind::delete_level: return baseline_delete_in_place(s, r.level);
        case RequestKind::delete_id:
            return detail::delete_by_id_via(s, r.id, options,
                                            [](Situation& sit, Level l) { return baseline_delete_in_place(sit, l); });
    }
    return make_error(ErrorCode::inadmissible, "unknown request kind");
}

namespace detail {

inline Status require_sorted(const Situation& s) {
    if (is_sorted_compact(s)) return ok();
    return make_error(ErrorCode::invalid_situation, "input is not in sorted-compact form");
}

}  // namespace detail

inline Expected<Step> baseline_insert(const Situation& s, Level level) {
    if (auto st = detail::require_sorted(s); !st) return st.error();
    Situation next = s;
    auto log = baseline_insert_in_place(next, level);
    if (!log) return log.error();
    return Step{std::move(next), std::move(*log)};
}

inline Expected<Step> baseline_delete(const Situation& s, Level level) {
    if (auto st = detail::require_sorted(s); !st) return st.error();
    Situation next = s;
    auto log = baseline_delete_in_place(next, level);
    if (!log) return log.error();
    return Step{std::move(next), std::move(*log)};
}

class BaselineAllocator {
public:
    static constexpr const char* name = "baseline";

    explicit BaselineAllocator(Level height, AllocatorOptions options = {}) : situation_(height), options_(options) {}

    const Situation& situation() const { return situation_; }
    const AllocatorOptions& options() const { return options_; }

    Expected<MoveLog> apply(const Request& r) { return baseline_apply_in_place(situation_, r, options_); }

private:
    Situation situation_;
    AllocatorOptions options_;
};

}  // namespace ovsf
