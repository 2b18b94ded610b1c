#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "ovsf/situation.hpp"

namespace ovsf {

/// Colors of all pebbles in position order. A pebble is black iff no strictly bigger pebble
/// precedes it.
inline std::vector<Color> colors(const Situation& s) {
    std::vector<Color> out;
    out.reserve(s.size());
    Level max_before = -1;
    for (const auto& p : s) {
        out.push_back(p.level >= max_before ? Color::black : Color::white);
        max_before = std::max(max_before, p.level);
    }
    return out;
}

inline Expected<Color> color_of(const Situation& s, PebbleId id) {
    const Pebble* target = s.find(id);
    if (target == nullptr) return make_error(ErrorCode::unknown_id, "unknown pebble id");
    for (const auto& p : s) {
        if (p.start >= target->start) break;
        if (p.level > target->level) return Color::white;
    }
    return Color::black;
}

/// Leaves before `p` covered by no pebble.
inline std::uint64_t free_bandwidth_before(const Situation& s, Position p) {
    std::uint64_t covered = 0;
    for (const auto& peb : s) {
        if (peb.start >= p) break;
        covered += std::min<Position>(peb.end(), p) - peb.start;
    }
    return std::min<Position>(p, s.capacity()) - covered;
}

inline std::uint64_t total_free_bandwidth(const Situation& s) { return s.free_bandwidth(); }

/// Free intervals [begin, end) between pebbles, in position order.
struct Gap {
    Position begin;
    Position end;
    std::uint64_t length() const { return end - begin; }
};

inline std::vector<Gap> gaps(const Situation& s) {
    std::vector<Gap> out;
    Position cursor = 0;
    for (const auto& p : s) {
        if (p.start > cursor) out.push_back({cursor, p.start});
        cursor = std::max(cursor, p.end());
    }
    if (cursor < s.capacity()) out.push_back({cursor, s.capacity()});
    return out;
}

/// Free aligned place of the given level with minimal start.
inline std::optional<Place> first_free_place(const Situation& s, Level level) {
    if (!s.in_range(level)) return std::nullopt;
    const std::uint64_t size = size_of(level);
    Position cursor = 0;
    auto try_gap = [&](Position begin, Position end) -> std::optional<Place> {
        Position start = align_up(begin, size);
        if (start + size <= end) return Place{level, start};
        return std::nullopt;
    };
    for (const auto& p : s) {
        if (p.start > cursor) {
            if (auto place = try_gap(cursor, p.start)) return place;
        }
        cursor = std::max(cursor, p.end());
    }
    return try_gap(cursor, s.capacity());
}

/// Position just after the last black pebble of `level`; failing that, the start of the first
/// pebble of a bigger level.
inline std::optional<Position> closing_position(const Situation& s, Level level) {
    std::optional<Position> after_last_black;
    std::optional<Position> first_bigger;
    Level max_before = -1;
    for (const auto& p : s) {
        const bool black = p.level >= max_before;
        if (black && p.level == level) after_last_black = p.end();
        if (!first_bigger && p.level > level) first_bigger = p.start;
        max_before = std::max(max_before, p.level);
    }
    return after_last_black ? after_last_black : first_bigger;
}

/// Greedy left-to-right decomposition of free space into maximal aligned places.
inline std::vector<Place> canonical_free_places(const Situation& s) {
    std::vector<Place> out;
    for (const auto& gap : gaps(s)) {
        Position cursor = gap.begin;
        while (cursor < gap.end) {
            Level level = 0;
            while (level < s.height() && cursor % size_of(level + 1) == 0 &&
                   cursor + size_of(level + 1) <= gap.end) {
                ++level;
            }
            out.push_back({level, cursor});
            cursor += size_of(level);
        }
    }
    return out;
}

enum class ViolationKind { p1, p2, p3, alignment, overlap, p4 };

inline const char* to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::p1: return "P1";
        case ViolationKind::p2: return "P2";
        case ViolationKind::p3: return "P3";
        case ViolationKind::alignment: return "alignment";
        case ViolationKind::overlap: return "overlap";
        case ViolationKind::p4: return "P4";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::vector<Pebble> witnesses;
    std::string detail;
    std::optional<Place> place;

    std::string describe() const {
        std::string out = to_string(kind);
        for (std::size_t i = 0; i < witnesses.size(); ++i) {
            out += (i == 0 ? " at " : ",");
            out += std::to_string(witnesses[i].size()) + "@" + std::to_string(witnesses[i].start);
        }
        if (place) out += " at free " + std::to_string(place->size()) + "@" + std::to_string(place->start);
        if (!detail.empty()) out += " (" + detail + ")";
        return out;
    }
};

/// All breaches of well-formedness and of P1-P3, position-ascending.
inline std::vector<Violation> validate(const Situation& s) {
    std::vector<Violation> out;
    const auto pebbles = s.pebbles();
    const auto color = colors(s);

    std::uint64_t free_before = 0;
    Position cursor = 0;
    for (std::size_t k = 0; k < pebbles.size(); ++k) {
        const Pebble& x = pebbles[k];
        if (!x.place().aligned()) {
            out.push_back({ViolationKind::alignment, {x}, "start not a multiple of size", std::nullopt});
        }
        if (k > 0 && pebbles[k - 1].end() > x.start) {
            out.push_back({ViolationKind::overlap, {pebbles[k - 1], x}, "", std::nullopt});
        }
        if (x.start > cursor) free_before += x.start - cursor;
        cursor = std::max(cursor, x.end());
        if (free_before >= x.size()) {
            out.push_back({ViolationKind::p1, {x}, "free bandwidth before is " + std::to_string(free_before), std::nullopt});
        }
        if (k > 0 && color[k] == Color::white && color[k - 1] == Color::white) {
            out.push_back({ViolationKind::p2, {pebbles[k - 1], x}, "adjacent white pebbles", std::nullopt});
        }
        if (k > 0 && k + 1 < pebbles.size() && color[k] == Color::white && color[k - 1] == Color::black &&
            color[k + 1] == Color::black && pebbles[k - 1].level == pebbles[k + 1].level) {
            out.push_back({ViolationKind::p3, {x}, "white between equal black neighbors", std::nullopt});
        }
    }
    return out;
}

inline bool is_valid(const Situation& s) { return validate(s).empty(); }

}  // namespace ovsf
