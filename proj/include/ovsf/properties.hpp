#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ovsf/model.hpp"

namespace ovsf {

// Brute-force oracles. They work on a per-leaf coverage map and share no search logic with the
// model queries they are compared against.
namespace oracle {

/// Number of pebbles covering each leaf.
inline std::vector<unsigned> leaf_cover(const Situation& s) {
    std::vector<unsigned> cover(s.capacity(), 0);
    for (const auto& p : s) {
        for (Position q = p.start; q < p.end() && q < s.capacity(); ++q) ++cover[q];
    }
    return cover;
}

inline bool all_free(const std::vector<unsigned>& cover, Position begin, Position end) {
    for (Position q = begin; q < end; ++q) {
        if (cover[q] != 0) return false;
    }
    return true;
}

/// First fully free aligned interval of size 2^l, by trying every candidate start.
inline std::optional<Place> first_free(const Situation& s, Level l) {
    if (l < 0 || l > s.height()) return std::nullopt;
    const auto cover = leaf_cover(s);
    const std::uint64_t size = size_of(l);
    for (std::uint64_t k = 0; k < s.capacity() / size; ++k) {
        if (all_free(cover, k * size, (k + 1) * size)) return Place{l, k * size};
    }
    return std::nullopt;
}

inline std::uint64_t free_leaves_before(const std::vector<unsigned>& cover, Position p) {
    std::uint64_t n = 0;
    for (Position q = 0; q < p && q < cover.size(); ++q) n += cover[q] == 0 ? 1 : 0;
    return n;
}

/// Color straight from the rule: white iff some earlier pebble is strictly bigger.
inline Color color(const Situation& s, const Pebble& x) {
    for (const auto& p : s) {
        if (p.start < x.start && p.level > x.level) return Color::white;
    }
    return Color::black;
}

/// P1-P3 plus alignment and disjointness, decided from the definitions.
inline bool valid(const Situation& s) {
    const auto cover = leaf_cover(s);
    for (unsigned c : cover) {
        if (c > 1) return false;
    }
    const auto seq = s.pebbles();
    std::vector<Color> col;
    for (const auto& p : seq) {
        if (p.start % p.size() != 0) return false;
        if (free_leaves_before(cover, p.start) >= p.size()) return false;
        col.push_back(color(s, p));
    }
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (col[k] != Color::white) continue;
        // P2: a black pebble between any two whites.
        for (std::size_t j = k + 1; j < seq.size(); ++j) {
            if (col[j] == Color::black) break;
            return false;
        }
        if (k > 0 && k + 1 < seq.size() && col[k - 1] == Color::black && col[k + 1] == Color::black &&
            seq[k - 1].level == seq[k + 1].level) {
            return false;
        }
    }
    return true;
}

}  // namespace oracle

/// True iff some aligned free place of level l exists.
inline bool canput_oracle(const Situation& s, Level l) { return oracle::first_free(s, l).has_value(); }

struct PropertyFailure {
    std::string property;
    std::string detail;
};

namespace detail {

inline std::string at(const Pebble& p) { return std::to_string(p.size()) + "@" + std::to_string(p.start); }

/// Length of the free run starting at `p`.
inline std::uint64_t free_run(const std::vector<unsigned>& cover, Position p) {
    std::uint64_t n = 0;
    while (p + n < cover.size() && cover[p + n] == 0) ++n;
    return n;
}

}  // namespace detail

/// Structural facts every valid situation must have. Returns one entry per failed property.
inline std::vector<PropertyFailure> check_situation(const Situation& s) {
    std::vector<PropertyFailure> out;
    auto fail = [&](const char* name, std::string detail) { out.push_back({name, std::move(detail)}); };

    const bool valid_by_definition = oracle::valid(s);
    if (valid_by_definition != validate(s).empty()) {
        fail("validator_agreement", valid_by_definition ? "validate reports a violation" : "validate misses a violation");
    }
    if (!valid_by_definition) {
        fail("valid", "situation breaks P1-P3");
        return out;
    }

    const auto cover = oracle::leaf_cover(s);
    const auto seq = s.pebbles();
    const auto col = colors(s);
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (col[k] != oracle::color(s, seq[k])) fail("color_agreement", detail::at(seq[k]));
    }

    if (!seq.empty() && seq.front().start != 0) fail("first_at_zero", detail::at(seq.front()));

    std::optional<Level> last_black;
    std::optional<Level> last_white;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        const Pebble& x = seq[k];
        if (col[k] == Color::black) {
            if (last_black && x.level < *last_black) fail("black_nondecreasing", detail::at(x));
            last_black = x.level;
        } else {
            if (last_white && x.level <= *last_white) fail("white_increasing", detail::at(x));
            last_white = x.level;
        }
    }

    // Black pebbles of one level sit next to each other with nothing in between.
    for (std::size_t k = 0; k < seq.size(); ++k) {
        if (col[k] != Color::black) continue;
        for (std::size_t j = k + 1; j < seq.size(); ++j) {
            if (col[j] == Color::black && seq[j].level == seq[k].level) {
                if (j != k + 1 || seq[k].end() != seq[j].start) {
                    fail("black_runs_contiguous", detail::at(seq[k]) + " .. " + detail::at(seq[j]));
                }
                break;
            }
        }
    }

    for (std::size_t k = 0; k < seq.size(); ++k) {
        const Pebble& x = seq[k];
        if (col[k] == Color::white) {
            if (k == 0 || col[k - 1] != Color::black || seq[k - 1].level <= x.level || seq[k - 1].end() != x.start) {
                fail("white_left_neighbor", detail::at(x));
            }
        }
        if (x.start > 0 && cover[x.start - 1] == 0 && col[k] != Color::black) {
            fail("free_before_means_black", detail::at(x));
        }
        const std::uint64_t after = detail::free_run(cover, x.end());
        if (after > 0 && after < x.size()) fail("space_after_size", detail::at(x) + " followed by " + std::to_string(after));

        if (k > 0 && col[k] == Color::white && col[k - 1] == Color::black) {
            const Pebble& b = seq[k - 1];
            if (after < b.size() - x.size()) {
                fail("white_space_after", detail::at(x) + " after " + detail::at(b));
            }
            for (std::size_t j = 0; j < seq.size(); ++j) {
                if (j == k || col[j] != Color::white) continue;
                if (seq[j].level >= x.level && seq[j].level < b.level) {
                    fail("white_killer", detail::at(seq[j]) + " against " + detail::at(b) + "," + detail::at(x));
                }
            }
            if (auto j = closing_position(s, x.level + 1)) {
                for (Position q = *j; q < b.start; ++q) {
                    if (cover[q] == 0) {
                        fail("white_killer2", "free leaf " + std::to_string(q));
                        break;
                    }
                }
                for (std::size_t w = 0; w < seq.size(); ++w) {
                    if (col[w] == Color::white && seq[w].start >= *j && seq[w].start < b.start) {
                        fail("white_killer2", "white " + detail::at(seq[w]));
                    }
                }
            }
        }
    }

    const std::uint64_t free_total = oracle::free_leaves_before(cover, s.capacity());
    for (Level l = 0; l <= s.height(); ++l) {
        const auto brute = oracle::first_free(s, l);
        const auto fast = first_free_place(s, l);
        if (brute != fast) fail("first_free_agreement", "level " + std::to_string(l));
        if (free_total >= size_of(l) && !brute) fail("can_put", "level " + std::to_string(l));
        if (!brute) continue;
        if (oracle::free_leaves_before(cover, brute->start) >= brute->size()) {
            fail("first_free_bandwidth", "level " + std::to_string(l));
        }
        if (const Pebble* z = s.first_from(brute->end())) {
            if (oracle::color(s, *z) != Color::black || z->size() <= brute->size()) {
                fail("right_neighbor", "level " + std::to_string(l) + " next " + detail::at(*z));
            }
        }
    }

    if (!seq.empty()) {
        Situation shorter = s;
        (void)shorter.remove(seq.back().id);
        if (!oracle::valid(shorter)) fail("remove_last", detail::at(seq.back()));
    }
    return out;
}

}  // namespace ovsf
