#pragma once

#include <algorithm>
#include <vector>

#include "ovsf/request.hpp"
#include "ovsf/situation.hpp"

namespace ovsf::detail {

/// Transactional editing of a situation: records every removal and placement so a failed
/// procedure can be rolled back, and folds the touched pebbles into a per-pebble move list.
class Edit {
public:
    explicit Edit(Situation& s) : s_(s), saved_next_id_(s.next_id_) {}

    Edit(const Edit&) = delete;
    Edit& operator=(const Edit&) = delete;

    ~Edit() {
        if (!committed_) rollback();
    }

    Situation& situation() { return s_; }

    Expected<Pebble> take(PebbleId id) {
        auto p = s_.remove(id);
        if (!p) return p;
        journal_.push_back({Op::taken, *p});
        note_origin(*p);
        return p;
    }

    Status put(const Pebble& p) {
        if (auto st = s_.put(p); !st) return st;
        journal_.push_back({Op::put, p});
        return ok();
    }

    Status put(Pebble p, Position start) {
        p.start = start;
        return put(p);
    }

    Status move(PebbleId id, Position start) {
        auto p = take(id);
        if (!p) return p.error();
        return put(*p, start);
    }

    void commit() { committed_ = true; }

    /// Net moves of pre-existing pebbles, in order of first touch. Pebbles listed in `exclude`
    /// (new or removed ones) and pebbles that returned to their origin are omitted.
    std::vector<Move> moves(const std::vector<PebbleId>& exclude = {}) const {
        std::vector<Move> out;
        for (const auto& origin : origins_) {
            if (std::find(exclude.begin(), exclude.end(), origin.id) != exclude.end()) continue;
            const Pebble* now = s_.find(origin.id);
            if (now == nullptr || now->start == origin.start) continue;
            out.push_back({origin.id, origin.place(), now->place()});
        }
        return out;
    }

private:
    enum class Op { taken, put };
    struct Entry {
        Op op;
        Pebble pebble;
    };

    void note_origin(const Pebble& p) {
        for (const auto& o : origins_) {
            if (o.id == p.id) return;
        }
        origins_.push_back(p);
    }

    void rollback() {
        for (auto it = journal_.rbegin(); it != journal_.rend(); ++it) {
            if (it->op == Op::put) {
                (void)s_.remove(it->pebble.id);
            } else {
                (void)s_.put(it->pebble);
            }
        }
        journal_.clear();
        s_.next_id_ = saved_next_id_;
    }

    Situation& s_;
    std::uint64_t saved_next_id_;
    std::vector<Entry> journal_;
    std::vector<Pebble> origins_;
    bool committed_ = false;
};

}  // namespace ovsf::detail
