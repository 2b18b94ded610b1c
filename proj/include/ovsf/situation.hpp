#pragma once

#include <cassert>
#include <iterator>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ovsf/types.hpp"

namespace ovsf {

namespace detail {
class Edit;
}

/// Allocator state: a tree height plus the pebbles currently placed on it, ordered by start.
///
/// Pebbles are indexed three ways: by start (the authoritative order), by id, and per level.
/// The structure enforces range and distinct starts/ids; alignment and disjointness are enforced
/// by the checked mutators but can be bypassed with `from_pebbles(..., Checking::off)` so that
/// malformed inputs can be handed to `validate`.
class Situation {
public:
    enum class Checking { on, off };

    using Map = std::map<Position, Pebble>;

    class const_iterator {
    public:
        using iterator_category = std::bidirectional_iterator_tag;
        using value_type = Pebble;
        using difference_type = std::ptrdiff_t;
        using pointer = const Pebble*;
        using reference = const Pebble&;

        const_iterator() = default;
        explicit const_iterator(Map::const_iterator it) : it_(it) {}

        reference operator*() const { return it_->second; }
        pointer operator->() const { return &it_->second; }
        const_iterator& operator++() { ++it_; return *this; }
        const_iterator operator++(int) { auto copy = *this; ++it_; return copy; }
        const_iterator& operator--() { --it_; return *this; }
        const_iterator operator--(int) { auto copy = *this; --it_; return copy; }
        friend bool operator==(const const_iterator&, const const_iterator&) = default;

    private:
        Map::const_iterator it_;
    };

    explicit Situation(Level height) : height_(height), by_level_(static_cast<std::size_t>(height) + 1) {
        assert(height >= 0 && height <= kMaxHeight);
    }

    /// Builds a situation from explicit pebbles. Ids of 0 are replaced by fresh ids.
    static Expected<Situation> from_pebbles(Level height, const std::vector<Pebble>& pebbles,
                                            Checking checking = Checking::on) {
        if (height < 0 || height > kMaxHeight) {
            return make_error(ErrorCode::level_out_of_range, "tree height out of range");
        }
        Situation s(height);
        std::uint64_t max_id = 0;
        for (const auto& p : pebbles) max_id = std::max(max_id, to_underlying(p.id));
        s.next_id_ = max_id + 1;
        for (auto p : pebbles) {
            if (to_underlying(p.id) == 0) p.id = s.fresh_id();
            if (p.level < 0 || p.level > height || p.end() > s.capacity()) {
                return make_error(ErrorCode::level_out_of_range,
                                  "pebble " + std::to_string(p.size()) + "@" + std::to_string(p.start) +
                                      " does not fit a tree of height " + std::to_string(height));
            }
            if (s.by_start_.count(p.start) != 0 || s.by_id_.count(p.id) != 0) {
                return make_error(ErrorCode::invalid_situation,
                                  "duplicate pebble start or id at " + std::to_string(p.start));
            }
            if (checking == Checking::on) {
                if (auto st = s.put(p); !st) return st.error();
            } else {
                s.insert_unchecked(p);
            }
        }
        return s;
    }

    Level height() const noexcept { return height_; }
    std::uint64_t capacity() const noexcept { return size_of(height_); }
    std::size_t size() const noexcept { return by_start_.size(); }
    bool empty() const noexcept { return by_start_.empty(); }
    std::uint64_t occupied() const noexcept { return occupied_; }
    std::uint64_t free_bandwidth() const noexcept { return capacity() - occupied_; }

    const_iterator begin() const { return const_iterator(by_start_.begin()); }
    const_iterator end() const { return const_iterator(by_start_.end()); }

    std::vector<Pebble> pebbles() const {
        std::vector<Pebble> out;
        out.reserve(size());
        for (const auto& p : *this) out.push_back(p);
        return out;
    }

    const Pebble* find(PebbleId id) const {
        auto it = by_id_.find(id);
        return it == by_id_.end() ? nullptr : &by_start_.at(it->second);
    }

    const Pebble* at(Position start) const {
        auto it = by_start_.find(start);
        return it == by_start_.end() ? nullptr : &it->second;
    }

    /// Last pebble starting strictly before `p`.
    const Pebble* last_before(Position p) const {
        auto it = by_start_.lower_bound(p);
        if (it == by_start_.begin()) return nullptr;
        return &std::prev(it)->second;
    }

    /// First pebble starting at or after `p`.
    const Pebble* first_from(Position p) const {
        auto it = by_start_.lower_bound(p);
        return it == by_start_.end() ? nullptr : &it->second;
    }

    const Pebble* left_neighbor(const Pebble& pebble) const { return last_before(pebble.start); }
    const Pebble* right_neighbor(const Pebble& pebble) const { return first_from(pebble.start + 1); }

    std::size_t count_of_level(Level level) const {
        return in_range(level) ? by_level_[static_cast<std::size_t>(level)].size() : 0;
    }

    const Pebble* rightmost_of_level(Level level) const {
        if (!in_range(level)) return nullptr;
        const auto& starts = by_level_[static_cast<std::size_t>(level)];
        return starts.empty() ? nullptr : &by_start_.at(*starts.rbegin());
    }

    /// Per-level pebble counts, i.e. the request vector the situation serves.
    std::vector<std::size_t> request_vector() const {
        std::vector<std::size_t> r;
        for (const auto& starts : by_level_) r.push_back(starts.size());
        return r;
    }

    bool in_range(Level level) const noexcept { return level >= 0 && level <= height_; }

    /// True iff `place` is inside the tree and no pebble overlaps it.
    bool is_free(const Place& place) const {
        if (!in_range(place.level) || place.end() > capacity()) return false;
        const Pebble* before = last_before(place.end());
        return before == nullptr || before->end() <= place.start;
    }

    PebbleId peek_next_id() const noexcept { return PebbleId{next_id_}; }

    // Mutators. All checked ones leave the situation untouched on error.

    /// Places a new pebble with a fresh id.
    Expected<PebbleId> place(Level level, Position start) {
        Pebble p{PebbleId{next_id_}, level, start};
        if (auto st = put(p); !st) return st.error();
        return p.id;
    }

    /// Places a pebble with a caller-chosen id.
    Status put(const Pebble& p) {
        if (!in_range(p.level)) {
            return make_error(ErrorCode::level_out_of_range, "level " + std::to_string(p.level) + " exceeds tree height");
        }
        if (p.end() > capacity()) {
            return make_error(ErrorCode::placement_conflict, "place " + std::to_string(p.size()) + "@" +
                                                                 std::to_string(p.start) + " lies outside the tree");
        }
        if (by_id_.count(p.id) != 0) {
            return make_error(ErrorCode::placement_conflict, "id already present");
        }
        if (!p.place().aligned()) {
            return make_error(ErrorCode::placement_conflict,
                              "misaligned place " + std::to_string(p.size()) + "@" + std::to_string(p.start));
        }
        if (!is_free(p.place())) {
            return make_error(ErrorCode::placement_conflict,
                              "place " + std::to_string(p.size()) + "@" + std::to_string(p.start) + " is not free");
        }
        insert_unchecked(p);
        if (to_underlying(p.id) >= next_id_) next_id_ = to_underlying(p.id) + 1;
        return ok();
    }

    Expected<Pebble> remove(PebbleId id) {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) return make_error(ErrorCode::unknown_id, "unknown pebble id");
        auto node = by_start_.find(it->second);
        Pebble p = node->second;
        by_level_[static_cast<std::size_t>(p.level)].erase(p.start);
        by_start_.erase(node);
        by_id_.erase(it);
        occupied_ -= p.size();
        return p;
    }

    Status move(PebbleId id, Position new_start) {
        auto removed = remove(id);
        if (!removed) return removed.error();
        Pebble moved = *removed;
        moved.start = new_start;
        if (auto st = put(moved); !st) {
            insert_unchecked(*removed);
            return st;
        }
        return ok();
    }

    /// Exchanges the identities of two pebbles; positions stay put.
    Status swap_ids(PebbleId a, PebbleId b) {
        auto ia = by_id_.find(a);
        auto ib = by_id_.find(b);
        if (ia == by_id_.end() || ib == by_id_.end()) {
            return make_error(ErrorCode::unknown_id, "unknown pebble id");
        }
        Position pa = ia->second;
        Position pb = ib->second;
        by_start_.at(pa).id = b;
        by_start_.at(pb).id = a;
        ia->second = pb;
        ib->second = pa;
        return ok();
    }

    friend bool operator==(const Situation& a, const Situation& b) {
        return a.height_ == b.height_ && a.next_id_ == b.next_id_ && a.by_start_ == b.by_start_;
    }

    /// Same pebble geometry, identities ignored.
    bool same_layout(const Situation& other) const {
        if (height_ != other.height_ || size() != other.size()) return false;
        auto it = other.begin();
        for (const auto& p : *this) {
            if (p.start != it->start || p.level != it->level) return false;
            ++it;
        }
        return true;
    }

private:
    friend class detail::Edit;

    PebbleId fresh_id() { return PebbleId{next_id_++}; }

    void insert_unchecked(const Pebble& p) {
        by_start_.emplace(p.start, p);
        by_id_.emplace(p.id, p.start);
        by_level_[static_cast<std::size_t>(p.level)].insert(p.start);
        occupied_ += p.size();
    }

    Level height_;
    Map by_start_;
    std::unordered_map<PebbleId, Position> by_id_;
    std::vector<std::set<Position>> by_level_;
    std::uint64_t occupied_ = 0;
    std::uint64_t next_id_ = 1;
};

}  // namespace ovsf
