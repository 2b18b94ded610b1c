#pragma once

#include <algorithm>
#include <string>
#include <utility>

#include "ovsf/edit.hpp"
#include "ovsf/model.hpp"
#include "ovsf/request.hpp"

namespace ovsf {

namespace detail {

inline Level max_level_before(const Situation& s, Position p) {
    Level max = -1;
    for (const auto& peb : s) {
        if (peb.start >= p) break;
        max = std::max(max, peb.level);
    }
    return max;
}

inline Color color_in(const Situation& s, const Pebble& p) {
    return max_level_before(s, p.start) > p.level ? Color::white : Color::black;
}

inline Error broken(const std::string& what) {
    return make_error(ErrorCode::invalid_situation, "input is not a valid situation: " + what);
}

}  // namespace detail

/// Inserts a pebble of `level`, restoring P1-P3 with at most three reassignments.
///
/// Works in place; on any error the situation is left exactly as it was. The caller is
/// responsible for handing in a valid situation (see `insert` for the checked variant).
inline Expected<MoveLog> insert_in_place(Situation& s, Level level, const AllocatorOptions& options = {}) {
    if (!s.in_range(level)) {
        return make_error(ErrorCode::level_out_of_range, "level " + std::to_string(level) + " exceeds tree height");
    }
    const std::uint64_t a = size_of(level);
    if (s.free_bandwidth() < a) {
        return make_error(ErrorCode::insufficient_bandwidth,
                          "free bandwidth " + std::to_string(s.free_bandwidth()) + " < " + std::to_string(a));
    }
    const auto free = first_free_place(s, level);
    if (!free) return detail::broken("bandwidth suffices but no free place of size " + std::to_string(a));

    MoveLog log;
    log.kind = RequestKind::insert;
    log.level = level;

    detail::Edit edit(s);
    const Pebble fresh{s.peek_next_id(), level, free->start};

    auto finish = [&](InsertCase which) -> Expected<MoveLog> {
        const Pebble* placed = s.find(fresh.id);
        log.placed = Move{fresh.id, placed->place(), placed->place()};
        log.moved = edit.moves({fresh.id});
        log.insert_case = which;
        edit.commit();
        return log;
    };

    const Pebble* left = s.last_before(free->start);
    if (left == nullptr || detail::color_in(s, *left) == Color::black) {
        if (auto st = edit.put(fresh); !st) return st.error();
        return finish(left == nullptr ? InsertCase::no_left_neighbor : InsertCase::left_black);
    }

    const Pebble white = *left;
    const Pebble* c_ptr = s.left_neighbor(white);
    if (c_ptr == nullptr) return detail::broken("white pebble without left neighbor");
    const Pebble black = *c_ptr;

    if (black.level < level) {
        if (auto st = edit.put(fresh); !st) return st.error();
        return finish(InsertCase::white_small_left);
    }

    if (black.level == level) {
        auto b = edit.take(white.id);
        if (!b) return b.error();
        if (auto st = edit.put(fresh, black.end()); !st) return st.error();
        if (auto st = edit.put(*b, black.end() + a); !st) return st.error();
        return finish(InsertCase::rotation);
    }

    // The neighbor C is bigger than the request. Lift B out, then work with the bigger of the two
    // pebbles still to be placed as "A".
    auto taken = edit.take(white.id);
    if (!taken) return taken.error();
    const Position b_origin = white.start;
    Pebble big = fresh;
    Pebble small = *taken;
    if (small.level > big.level && !options.skip_insert_rename) {
        std::swap(big, small);
        log.renamed = true;
    }

    const auto closing = closing_position(s, big.level);
    if (!closing) return detail::broken("no pebble at the closing position");
    const Pebble* d_ptr = s.at(*closing);
    if (d_ptr == nullptr) return detail::broken("closing position is not occupied");
    const Pebble d = *d_ptr;

    if (detail::color_in(s, d) == Color::white) {
        const Pebble* e_ptr = s.right_neighbor(d);
        if (e_ptr == nullptr) return detail::broken("white closing pebble has no right neighbor");
        const Pebble e = *e_ptr;
        if (auto r = edit.take(d.id); !r) return r.error();
        if (auto r = edit.take(e.id); !r) return r.error();
        if (auto st = edit.put(big, d.start); !st) return st.error();
        if (auto st = edit.put(small, d.start + big.size()); !st) return st.error();
        if (auto st = edit.put(d, d.start + big.size() + small.size()); !st) return st.error();
        if (auto st = edit.put(e, b_origin); !st) return st.error();
        return finish(InsertCase::shuffle_white_close);
    }

    if (auto r = edit.take(d.id); !r) return r.error();
    if (auto st = edit.put(big, d.start); !st) return st.error();
    if (auto st = edit.put(small, d.start + big.size()); !st) return st.error();
    if (auto st = edit.put(d, b_origin); !st) return st.error();
    return finish(InsertCase::shuffle_black_close);
}

/// Removes the rightmost pebble of `level` and pushes the resulting gap to the right.
///
/// `observe(s, i, a)` sees the situation at the start of every loop pass together with the gap
/// start `i` and the level `a` of the virtual pebble standing on it.
template <typename Observer>
Expected<MoveLog> delete_last_observed(Situation& s, Level level, const AllocatorOptions& options, Observer&& observe) {
    if (!s.in_range(level)) {
        return make_error(ErrorCode::level_out_of_range, "level " + std::to_string(level) + " exceeds tree height");
    }
    const Pebble* last = s.rightmost_of_level(level);
    if (last == nullptr) {
        return make_error(ErrorCode::no_such_level, "no pebble of level " + std::to_string(level));
    }

    MoveLog log;
    log.kind = RequestKind::delete_level;
    log.level = level;

    detail::Edit edit(s);
    auto removed = edit.take(last->id);
    if (!removed) return removed.error();
    log.removed = *removed;

    Position gap = removed->start;
    Level gap_level = level;
    for (;;) {
        observe(std::as_const(s), gap, gap_level);
        const Pebble* smallest = nullptr;
        for (auto it = s.first_from(gap); it != nullptr; it = s.right_neighbor(*it)) {
            if (smallest == nullptr || it->level < smallest->level) smallest = it;
        }
        if (smallest == nullptr) {
            log.exit = DeleteExit::no_pebbles_right;
            break;
        }
        const Level x_level = smallest->level;
        const Place target{x_level, gap};
        if (!target.aligned() || !s.is_free(target)) {
            log.exit = DeleteExit::does_not_fit;
            break;
        }

        const Pebble x = *s.rightmost_of_level(x_level);
        DeleteStep step;
        step.gap_start = gap;
        step.gap_level = gap_level;
        step.moved_level = x_level;
        step.moved_from = x.start;

        // Color of X and its left neighbor Y with the virtual pebble A_t sitting on the gap.
        const Pebble* real_left = s.last_before(x.start);
        const Level before_x = std::max(detail::max_level_before(s, x.start), gap_level);
        step.virtual_color = before_x > x_level ? Color::white : Color::black;
        const Level y_level = (real_left == nullptr || real_left->start < gap) ? gap_level : real_left->level;
        const Level next_gap_level = step.virtual_color == Color::black ? x_level : y_level;

        if (auto st = edit.move(x.id, gap); !st) return st.error();

        if (!options.skip_delete_swap) {
            const Pebble* q = s.last_before(gap);
            if (q != nullptr && detail::color_in(s, *q) == Color::white) {
                const Pebble* w = s.left_neighbor(*q);
                if (w != nullptr && w->level == x_level) {
                    const Pebble q_copy = *q;
                    const Pebble x_now = *s.find(x.id);
                    if (auto r = edit.take(x_now.id); !r) return r.error();
                    if (auto r = edit.take(q_copy.id); !r) return r.error();
                    if (auto st = edit.put(x_now, q_copy.start); !st) return st.error();
                    if (auto st = edit.put(q_copy, q_copy.start + x_now.size()); !st) return st.error();
                    step.swapped = true;
                }
            }
        }

        log.steps.push_back(step);
        ++log.iterations;
        gap = x.start;
        gap_level = next_gap_level;
    }

    log.moved = edit.moves({removed->id});
    edit.commit();
    return log;
}

inline Expected<MoveLog> delete_last_in_place(Situation& s, Level level, const AllocatorOptions& options = {}) {
    return delete_last_observed(s, level, options, [](const Situation&, Position, Level) {});
}

namespace detail {

/// Deletion of a specific pebble via deletion of the last pebble of its level: identities of the
/// target and the last pebble are exchanged first, so the survivor keeps the target's place.
template <typename DeleteLast>
Expected<MoveLog> delete_by_id_via(Situation& s, PebbleId id, const AllocatorOptions& options,
                                   DeleteLast&& delete_last) {
    const Pebble* target = s.find(id);
    if (target == nullptr) {
        return make_error(ErrorCode::unknown_id, "unknown pebble id " + std::to_string(to_underlying(id)));
    }
    const Pebble doomed = *target;
    const Pebble last = *s.rightmost_of_level(doomed.level);

    std::optional<Move> relabel;
    if (last.id != doomed.id) {
        (void)s.swap_ids(doomed.id, last.id);
        relabel = Move{last.id, last.place(), doomed.place()};
    }
    auto log = delete_last(s, doomed.level);
    if (!log) {
        if (relabel) (void)s.swap_ids(doomed.id, last.id);
        return log;
    }
    log->kind = RequestKind::delete_id;
    log->relabel = relabel;
    if (relabel && options.count_relabel) {
        auto same = std::find_if(log->moved.begin(), log->moved.end(),
                                 [&](const Move& m) { return m.id == relabel->id; });
        if (same != log->moved.end()) {
            same->from = relabel->from;
        } else {
            log->moved.insert(log->moved.begin(), *relabel);
        }
    }
    return log;
}

}  // namespace detail

inline Expected<MoveLog> delete_by_id_in_place(Situation& s, PebbleId id, const AllocatorOptions& options = {}) {
    return detail::delete_by_id_via(s, id, options,
                                    [&](Situation& sit, Level l) { return delete_last_in_place(sit, l, options); });
}

inline Expected<MoveLog> apply_in_place(Situation& s, const Request& r, const AllocatorOptions& options = {}) {
    switch (r.kind) {
        case RequestKind::insert: return insert_in_place(s, r.level, options);
        case RequestKind::delete_level: return delete_last_in_place(s, r.level, options);
        case RequestKind::delete_id: return delete_by_id_in_place(s, r.id, options);
    }
    return make_error(ErrorCode::inadmissible, "unknown request kind");
}

/// Result of a pure (copying) allocator step.
struct Step {
    Situation situation;
    MoveLog log;
};

namespace detail {

inline Status require_valid(const Situation& s) {
    auto violations = validate(s);
    if (violations.empty()) return ok();
    return broken(violations.front().describe());
}

template <typename Fn>
Expected<Step> checked_step(const Situation& s, Fn&& fn) {
    if (auto st = require_valid(s); !st) return st.error();
    Situation next = s;
    auto log = fn(next);
    if (!log) return log.error();
    return Step{std::move(next), std::move(*log)};
}

}  // namespace detail

inline Expected<Step> insert(const Situation& s, Level level, const AllocatorOptions& options = {}) {
    return detail::checked_step(s, [&](Situation& next) { return insert_in_place(next, level, options); });
}

inline Expected<Step> delete_last(const Situation& s, Level level, const AllocatorOptions& options = {}) {
    return detail::checked_step(s, [&](Situation& next) { return delete_last_in_place(next, level, options); });
}

inline Expected<Step> delete_by_id(const Situation& s, PebbleId id, const AllocatorOptions& options = {}) {
    return detail::checked_step(s, [&](Situation& next) { return delete_by_id_in_place(next, id, options); });
}

inline Expected<Step> apply(const Situation& s, const Request& r, const AllocatorOptions& options = {}) {
    return detail::checked_step(s, [&](Situation& next) { return apply_in_place(next, r, options); });
}

/// The online allocator: owns a situation and serves requests against it.
class PaperAllocator {
public:
    static constexpr const char* name = "paper";

    explicit PaperAllocator(Level height, AllocatorOptions options = {}) : situation_(height), options_(options) {}

    const Situation& situation() const { return situation_; }
    const AllocatorOptions& options() const { return options_; }

    Expected<MoveLog> apply(const Request& r) { return apply_in_place(situation_, r, options_); }

private:
    Situation situation_;
    AllocatorOptions options_;
};

}  // namespace ovsf
