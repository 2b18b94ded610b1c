#pragma once

#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "ovsf/snapshot.hpp"

namespace ovsf::testing {

/// Situation from a height and a blank-separated list of `<size>@<start>`; ids 1, 2, ... in order.
inline Situation sit(Level n, const std::string& pebbles) {
    std::string text = "n=" + std::to_string(n) + "\n";
    std::istringstream in(pebbles);
    for (std::string tok; in >> tok;) text += tok + "\n";
    auto s = parse_snapshot(text);
    if (!s) ADD_FAILURE() << s.error().message;
    return s ? std::move(*s) : Situation(n);
}

/// `<size>@<start>` list of a situation, blank separated.
inline std::string layout(const Situation& s) {
    std::string out;
    for (const auto& p : s) {
        if (!out.empty()) out += ' ';
        out += std::to_string(p.size()) + "@" + std::to_string(p.start);
    }
    return out;
}

/// Calls `fn` with every set of disjoint aligned places in a tree of height `n`, as a situation.
template <typename Fn>
void for_each_layout(Level n, Fn&& fn) {
    // Each vertex is either a pebble, or split into its two children (an empty vertex is a split
    // whose children are both empty).
    struct Node {
        Level level;
        Position start;
    };
    std::vector<Pebble> chosen;
    std::function<void(std::vector<Node>)> walk = [&](std::vector<Node> open) {
        if (open.empty()) {
            auto s = Situation::from_pebbles(n, chosen);
            if (s) fn(*s);
            return;
        }
        const Node v = open.back();
        open.pop_back();
        chosen.push_back({PebbleId{}, v.level, v.start});
        walk(open);
        chosen.pop_back();
        if (v.level == 0) {
            walk(open);
            return;
        }
        open.push_back({v.level - 1, v.start + size_of(v.level - 1)});
        open.push_back({v.level - 1, v.start});
        walk(std::move(open));
    };
    walk({{n, 0}});
}

inline PebbleId id_at(const Situation& s, Position start) {
    const Pebble* p = s.at(start);
    return p ? p->id : PebbleId{};
}

}  // namespace ovsf::testing
