#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovsf/model.hpp"
#include "ovsf/request.hpp"

namespace ovsf {

/// Coins a free place of size `p` must hold when the smallest pebble to its right has size `x`.
constexpr std::uint64_t required_coins(std::uint64_t p, std::uint64_t x) noexcept { return (2 * p) / x; }

/// A canonical free place together with what P4 asks of it.
struct CoinDemand {
    Place place;
    std::optional<Level> smallest_right;  // level of the smallest pebble to the right, if any
    std::uint64_t required = 0;
};

inline std::vector<CoinDemand> coin_demands(const Situation& s) {
    const auto places = canonical_free_places(s);
    std::vector<CoinDemand> out(places.size());
    const auto pebbles = s.pebbles();
    // Walk both sequences right to left keeping the minimum level seen so far.
    std::optional<Level> min_right;
    std::size_t k = pebbles.size();
    for (std::size_t idx = places.size(); idx-- > 0;) {
        const Place& place = places[idx];
        while (k > 0 && pebbles[k - 1].start >= place.end()) {
            --k;
            min_right = min_right ? std::min(*min_right, pebbles[k].level) : pebbles[k].level;
        }
        out[idx].place = place;
        out[idx].smallest_right = min_right;
        out[idx].required = min_right ? required_coins(place.size(), size_of(*min_right)) : 0;
    }
    return out;
}

struct CoinOptions {
    std::uint64_t insert_budget = 4;
    std::uint64_t delete_budget = 4;
};

/// What one settled request did to the ledger.
struct Settlement {
    RequestKind kind = RequestKind::insert;
    std::size_t iterations = 0;
    std::uint64_t injected = 0;
    std::uint64_t consumed = 0;
    std::uint64_t balance = 0;
    bool p4_ok = true;
    bool within_budget = true;

    // Where consumed coins came from.
    std::uint64_t consumed_fresh = 0;
    std::uint64_t consumed_uncovered = 0;
    std::uint64_t consumed_pool = 0;

    // Why fresh coins had to be placed on free places.
    std::uint64_t charged_to_touched = 0;  // smallest right pebble was touched by the request
    std::uint64_t charged_new_place = 0;   // place was not free before the request
    std::uint64_t charged_other = 0;       // neither; should stay zero

    std::uint64_t released = 0;  // coins freed because their place got covered
    std::vector<Violation> problems;

    bool clean() const { return p4_ok && within_budget; }

    std::string line() const {
        return "iters=" + std::to_string(iterations) + " injected=" + std::to_string(injected) +
               " consumed=" + std::to_string(consumed) + " balance=" + std::to_string(balance) +
               " p4=" + (p4_ok ? "ok" : "fail");
    }
};

/// Coin accounting run alongside an allocator.
///
/// Coins live on canonical free places. Coins whose place gets covered by a request are released
/// into a recycling pool; they pay for delete iterations and for topping up new free places before
/// any fresh coin is injected. Nothing is ever dropped: injected - consumed == balance.
class CoinLedger {
public:
    explicit CoinLedger(CoinOptions options = {}) : options_(options) {}

    const CoinOptions& options() const { return options_; }

    std::uint64_t coins_on(const Place& place) const {
        auto it = coins_.find(place);
        return it == coins_.end() ? 0 : it->second;
    }

    const std::map<Place, std::uint64_t>& coins() const { return coins_; }
    std::uint64_t pool() const { return pool_; }

    std::uint64_t balance() const {
        std::uint64_t total = pool_;
        for (const auto& [place, count] : coins_) total += count;
        return total;
    }

    std::uint64_t injected_total() const { return injected_total_; }
    std::uint64_t consumed_total() const { return consumed_total_; }
    std::uint64_t injected_this_request() const { return injected_this_request_; }
    std::uint64_t consumed_this_request() const { return consumed_this_request_; }

    /// Puts fresh coins on a place directly; counted as injected.
    void deposit(const Place& place, std::uint64_t count) {
        coins_[place] += count;
        injected_total_ += count;
    }

    // The situation before the request is not needed: what changed is in the log.

    Settlement settle_insert(const Situation& after, const MoveLog& log) {
        return settle(after, log, options_.insert_budget);
    }

    Settlement settle_delete(const Situation& after, const MoveLog& log) {
        return settle(after, log, options_.delete_budget);
    }

    Settlement settle(const Situation& after, const MoveLog& log) {
        return log.kind == RequestKind::insert ? settle_insert(after, log) : settle_delete(after, log);
    }

private:
    Settlement settle(const Situation& after, const MoveLog& log, std::uint64_t budget) {
        Settlement out;
        out.kind = log.kind;
        out.iterations = log.iterations;

        // Old coins either stay with a place that is still free, or get released.
        std::vector<std::pair<Place, std::uint64_t>> carried;
        std::uint64_t released = 0;
        for (const auto& [place, count] : coins_) {
            if (count == 0) continue;
            if (after.is_free(place)) {
                carried.emplace_back(place, count);
            } else {
                released += count;
            }
        }
        out.released = released;
        coins_.clear();

        std::uint64_t fresh = 0;
        auto draw = [&](std::uint64_t& from_uncovered, std::uint64_t& from_pool, std::uint64_t& from_fresh) {
            if (released > 0) {
                --released;
                ++from_uncovered;
            } else if (pool_ > 0) {
                --pool_;
                ++from_pool;
            } else {
                ++fresh;
                ++from_fresh;
            }
        };

        // One coin per loop iteration. The first is charged to the request itself.
        for (std::size_t t = 0; t < log.iterations; ++t) {
            if (t == 0) {
                ++fresh;
                ++out.consumed_fresh;
            } else {
                draw(out.consumed_uncovered, out.consumed_pool, out.consumed_fresh);
            }
        }
        out.consumed = log.iterations;

        auto demands = coin_demands(after);
        std::map<Position, std::size_t> index;  // place start -> demand index
        for (std::size_t k = 0; k < demands.size(); ++k) index.emplace(demands[k].place.start, k);
        std::vector<std::uint64_t> held(demands.size(), 0);

        // Reattach carried coins. Places are dyadic intervals, so an old free place either sits
        // inside one new place or is split into several.
        for (const auto& [old_place, count] : carried) {
            auto it = index.upper_bound(old_place.start);
            if (it != index.begin()) {
                std::size_t k = std::prev(it)->second;
                if (demands[k].place.contains(old_place)) {
                    held[k] += count;
                    continue;
                }
            }
            std::uint64_t remaining = count;
            std::optional<std::size_t> first;
            for (auto sub = index.lower_bound(old_place.start);
                 sub != index.end() && sub->first < old_place.end(); ++sub) {
                std::size_t k = sub->second;
                if (!first) first = k;
                const std::uint64_t need = demands[k].required > held[k] ? demands[k].required - held[k] : 0;
                const std::uint64_t give = std::min(need, remaining);
                held[k] += give;
                remaining -= give;
            }
            if (first) {
                held[*first] += remaining;
            } else {
                pool_ += remaining;
            }
        }

        // Top up whatever P4 still asks for.
        for (std::size_t k = 0; k < demands.size(); ++k) {
            while (held[k] < demands[k].required) {
                std::uint64_t from_uncovered = 0;
                std::uint64_t from_pool = 0;
                std::uint64_t from_fresh = 0;
                draw(from_uncovered, from_pool, from_fresh);
                ++held[k];
                if (from_fresh != 0) {
                    classify_fresh(log, demands[k], out);
                }
            }
        }

        pool_ += released;
        for (std::size_t k = 0; k < demands.size(); ++k) {
            if (held[k] != 0) coins_[demands[k].place] = held[k];
        }

        out.injected = fresh;
        injected_this_request_ = fresh;
        consumed_this_request_ = out.consumed;
        injected_total_ += fresh;
        consumed_total_ += out.consumed;
        out.balance = balance();

        for (std::size_t k = 0; k < demands.size(); ++k) {
            if (held[k] < demands[k].required) out.problems.push_back(shortfall(demands[k], held[k]));
        }
        out.p4_ok = out.problems.empty();
        out.within_budget = out.injected <= budget;
        return out;
    }

    static Violation shortfall(const CoinDemand& d, std::uint64_t have) {
        return {ViolationKind::p4, {}, "has " + std::to_string(have) + ", needs " + std::to_string(d.required), d.place};
    }

    // A place free now was occupied before only if a removed pebble or a moved pebble's old
    // place overlaps it.
    static bool was_free(const MoveLog& log, const Place& place) {
        if (log.removed && log.removed->place().overlaps(place)) return false;
        return std::none_of(log.moved.begin(), log.moved.end(), [&](const Move& m) { return m.from.overlaps(place); });
    }

    static void classify_fresh(const MoveLog& log, const CoinDemand& d, Settlement& out) {
        const bool free_before = was_free(log, d.place);
        bool smallest_touched = false;
        if (d.smallest_right) {
            auto is_smallest = [&](const Move& m) {
                return m.to.level == *d.smallest_right && m.to.start >= d.place.end();
            };
            smallest_touched = (log.placed && is_smallest(*log.placed)) ||
                               std::any_of(log.moved.begin(), log.moved.end(), is_smallest);
        }
        if (smallest_touched) {
            ++out.charged_to_touched;
        } else if (!free_before) {
            ++out.charged_new_place;
        } else {
            ++out.charged_other;
        }
    }

public:
    /// P4 check of the current coin placement against `s`.
    std::vector<Violation> audit_unchecked(const Situation& s) const {
        std::vector<Violation> out;
        for (const auto& d : coin_demands(s)) {
            const std::uint64_t have = coins_on(d.place);
            if (have < d.required) out.push_back(shortfall(d, have));
        }
        return out;
    }

private:
    CoinOptions options_;
    std::map<Place, std::uint64_t> coins_;
    std::uint64_t pool_ = 0;
    std::uint64_t injected_total_ = 0;
    std::uint64_t consumed_total_ = 0;
    std::uint64_t injected_this_request_ = 0;
    std::uint64_t consumed_this_request_ = 0;
};

/// P4 audit of a valid situation.
inline Expected<std::vector<Violation>> audit(const Situation& s, const CoinLedger& ledger) {
    auto violations = validate(s);
    if (!violations.empty()) {
        return make_error(ErrorCode::invalid_situation, "cannot audit an invalid situation: " + violations.front().describe());
    }
    return ledger.audit_unchecked(s);
}

}  // namespace ovsf
