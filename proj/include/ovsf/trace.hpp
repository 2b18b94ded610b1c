#pragma once

#include <charconv>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ovsf/request.hpp"

namespace ovsf {

/// A request sequence for a tree of fixed height.
///
/// Text form: a header `n=<height>`, then one request per line: `I <level>`, `D <level>` or
/// `DID <id>`. `#` starts a comment. Pebble ids are assigned 1, 2, ... to insertions in order.
struct Trace {
    Level height = 0;
    std::vector<Request> requests;

    friend bool operator==(const Trace&, const Trace&) = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
    s = trim(s);
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
}

inline Error line_error(std::size_t line, const std::string& what) {
    return make_error(ErrorCode::parse_error, "line " + std::to_string(line) + ": " + what);
}

}  // namespace detail

/// Replays only the bookkeeping of a trace: per-level counts, bandwidth, live ids.
/// Every prefix must be servable; reports the 1-based request index of the first one that is not.
class AdmissibilityTracker {
public:
    explicit AdmissibilityTracker(Level height) : height_(height), counts_(static_cast<std::size_t>(height) + 1, 0) {}

    /// Empty string when admissible, otherwise the reason.
    std::string check(const Request& r) const {
        switch (r.kind) {
            case RequestKind::insert:
                if (r.level < 0 || r.level > height_) return "level " + std::to_string(r.level) + " out of range";
                if (free() < size_of(r.level)) {
                    return "insertion of level " + std::to_string(r.level) + " exceeds free bandwidth " + std::to_string(free());
                }
                return {};
            case RequestKind::delete_level:
                if (r.level < 0 || r.level > height_) return "level " + std::to_string(r.level) + " out of range";
                if (counts_[static_cast<std::size_t>(r.level)] == 0) {
                    return "deletion from empty level " + std::to_string(r.level);
                }
                return {};
            case RequestKind::delete_id:
                if (live_.count(to_underlying(r.id)) == 0) {
                    return "deletion of unknown id " + std::to_string(to_underlying(r.id));
                }
                return {};
        }
        return "unknown request";
    }

    void apply(const Request& r) {
        switch (r.kind) {
            case RequestKind::insert:
                ++counts_[static_cast<std::size_t>(r.level)];
                used_ += size_of(r.level);
                live_.emplace(next_id_++, r.level);
                break;
            case RequestKind::delete_level: {
                --counts_[static_cast<std::size_t>(r.level)];
                used_ -= size_of(r.level);
                // The allocators remove a pebble of this level; which id goes away depends on the
                // allocator, so id tracking is dropped for levels touched by level deletions.
                for (auto it = live_.begin(); it != live_.end(); ++it) {
                    if (it->second == r.level) {
                        level_deletes_ = true;
                        live_.erase(it);
                        break;
                    }
                }
                break;
            }
            case RequestKind::delete_id: {
                auto it = live_.find(to_underlying(r.id));
                --counts_[static_cast<std::size_t>(it->second)];
                used_ -= size_of(it->second);
                live_.erase(it);
                break;
            }
        }
    }

    std::uint64_t free() const { return size_of(height_) - used_; }
    const std::vector<std::size_t>& counts() const { return counts_; }
    std::uint64_t next_id() const { return next_id_; }
    bool mixes_level_and_id_deletes() const { return level_deletes_; }

private:
    Level height_;
    std::vector<std::size_t> counts_;
    std::uint64_t used_ = 0;
    std::uint64_t next_id_ = 1;
    std::map<std::uint64_t, Level> live_;
    bool level_deletes_ = false;
};

inline Status check_admissible(const Trace& t) {
    AdmissibilityTracker tracker(t.height);
    for (std::size_t k = 0; k < t.requests.size(); ++k) {
        if (auto why = tracker.check(t.requests[k]); !why.empty()) {
            return make_error(ErrorCode::inadmissible, "request " + std::to_string(k + 1) + ": " + why);
        }
        tracker.apply(t.requests[k]);
    }
    return ok();
}

inline Expected<Trace> parse_trace(std::string_view text) {
    Trace trace;
    bool have_header = false;
    std::size_t line_no = 0;
    std::vector<std::size_t> lines;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (!have_header) {
            if (line.substr(0, 2) != "n=" || !detail::parse_int(line.substr(2), trace.height) ||
                trace.height < 0 || trace.height > kMaxHeight) {
                return detail::line_error(line_no, "expected header n=<height>");
            }
            have_header = true;
            continue;
        }
        auto space = line.find_first_of(" \t");
        if (space == std::string_view::npos) return detail::line_error(line_no, "expected '<op> <argument>'");
        std::string_view op = line.substr(0, space);
        std::string_view arg = line.substr(space + 1);
        Request r;
        if (op == "I" || op == "D") {
            Level level = 0;
            if (!detail::parse_int(arg, level)) return detail::line_error(line_no, "bad level");
            r = op == "I" ? Request::insert(level) : Request::remove(level);
        } else if (op == "DID") {
            std::uint64_t id = 0;
            if (!detail::parse_int(arg, id)) return detail::line_error(line_no, "bad id");
            r = Request::remove_id(PebbleId{id});
        } else {
            return detail::line_error(line_no, "unknown request '" + std::string(op) + "'");
        }
        trace.requests.push_back(r);
        lines.push_back(line_no);
    }
    if (!have_header) return detail::line_error(line_no, "missing header n=<height>");

    AdmissibilityTracker tracker(trace.height);
    for (std::size_t k = 0; k < trace.requests.size(); ++k) {
        if (auto why = tracker.check(trace.requests[k]); !why.empty()) {
            return make_error(ErrorCode::inadmissible, "line " + std::to_string(lines[k]) + " (request " +
                                                           std::to_string(k + 1) + "): " + why);
        }
        tracker.apply(trace.requests[k]);
    }
    return trace;
}

inline std::string format_request(const Request& r) {
    switch (r.kind) {
        case RequestKind::insert: return "I " + std::to_string(r.level);
        case RequestKind::delete_level: return "D " + std::to_string(r.level);
        case RequestKind::delete_id: return "DID " + std::to_string(to_underlying(r.id));
    }
    return "?";
}

inline std::string serialize_trace(const Trace& t) {
    std::string out = "n=" + std::to_string(t.height) + "\n";
    for (const auto& r : t.requests) {
        out += format_request(r);
        out += '\n';
    }
    return out;
}

}  // namespace ovsf
