#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ovsf/trace.hpp"

namespace ovsf {

struct RandomTraceOptions {
    Level height = 8;
    std::size_t length = 1000;
    std::uint64_t seed = 1;
    double insert_ratio = 0.5;
    bool delete_by_id = false;  // emit `DID <id>` instead of `D <level>`
};

namespace detail {

// Explicit mappings instead of the std distributions, whose outputs differ between standard
// libraries.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline std::uint64_t below(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

}  // namespace detail

/// Random admissible trace. Insert levels are uniform in [0, height] and lowered until they fit;
/// deletions hit a uniformly chosen live pebble. When the tree is full a deletion is forced, when
/// it is empty an insertion.
inline Trace gen_random_trace(const RandomTraceOptions& o) {
    Trace t{o.height, {}};
    t.requests.reserve(o.length);
    std::mt19937_64 rng(o.seed);
    std::vector<Level> live_levels;
    std::vector<std::uint64_t> live_ids;
    std::uint64_t next_id = 1;
    std::uint64_t free = size_of(o.height);

    for (std::size_t k = 0; k < o.length; ++k) {
        const bool insert = live_levels.empty() || (free > 0 && detail::unit(rng) < o.insert_ratio);
        if (insert) {
            auto level = static_cast<Level>(detail::below(rng, static_cast<std::uint64_t>(o.height) + 1));
            while (size_of(level) > free) --level;
            t.requests.push_back(Request::insert(level));
            live_levels.push_back(level);
            live_ids.push_back(next_id++);
            free -= size_of(level);
            continue;
        }
        const std::size_t pick = detail::below(rng, live_levels.size());
        const Level level = live_levels[pick];
        t.requests.push_back(o.delete_by_id ? Request::remove_id(PebbleId{live_ids[pick]}) : Request::remove(level));
        live_levels[pick] = live_levels.back();
        live_levels.pop_back();
        live_ids[pick] = live_ids.back();
        live_ids.pop_back();
        free += size_of(level);
    }
    return t;
}

inline Trace gen_random_trace(Level height, std::size_t length, std::uint64_t seed, double insert_ratio) {
    return gen_random_trace(RandomTraceOptions{height, length, seed, insert_ratio, false});
}

/// Fills one pebble per level 0..n-2 plus a second size-1 pebble, so the sorted layout is tight,
/// then alternates inserting and deleting a size-1 pebble. Each of those requests pushes through
/// every run of the sorted layout.
inline Trace gen_cascade_trace(Level height, std::size_t length) {
    Trace t{height, {}};
    std::vector<Request> fill;
    if (height >= 2) {
        fill.push_back(Request::insert(0));
        for (Level l = 0; l <= height - 2; ++l) fill.push_back(Request::insert(l));
    }
    for (std::size_t k = 0; k < length; ++k) {
        if (k < fill.size()) {
            t.requests.push_back(fill[k]);
        } else {
            const bool insert = (k - fill.size()) % 2 == 0;
            t.requests.push_back(insert ? Request::insert(0) : Request::remove(0));
        }
    }
    return t;
}

}  // namespace ovsf
