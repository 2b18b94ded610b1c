#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ovsf/model.hpp"
#include "ovsf/trace.hpp"

namespace ovsf {

/// Snapshot text: header `n=<height>`, then one `<size>@<start>` line per pebble sorted by start.
/// Pebbles read from a snapshot get ids 1, 2, ... in line order. Only range and duplicate-start
/// errors are rejected here; overlap, alignment and P1-P3 are left to `validate`.
inline Expected<Situation> parse_snapshot(std::string_view text) {
    std::optional<Level> height;
    std::vector<Pebble> pebbles;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (!height) {
            Level h = 0;
            if (line.substr(0, 2) != "n=" || !detail::parse_int(line.substr(2), h) || h < 0 || h > kMaxHeight) {
                return detail::line_error(line_no, "expected header n=<height>");
            }
            height = h;
            continue;
        }
        auto at = line.find('@');
        std::uint64_t size = 0;
        Position start = 0;
        if (at == std::string_view::npos || !detail::parse_int(line.substr(0, at), size) ||
            !detail::parse_int(line.substr(at + 1), start)) {
            return detail::line_error(line_no, "expected <size>@<start>");
        }
        if (size == 0 || (size & (size - 1)) != 0) {
            return detail::line_error(line_no, "size " + std::to_string(size) + " is not a power of two");
        }
        Level level = 0;
        while (size_of(level) < size) ++level;
        if (level > *height) return detail::line_error(line_no, "size " + std::to_string(size) + " exceeds the tree");
        pebbles.push_back({PebbleId{pebbles.size() + 1}, level, start});
    }
    if (!height) return detail::line_error(line_no, "missing header n=<height>");
    return Situation::from_pebbles(*height, pebbles, Situation::Checking::off);
}

inline std::string serialize_snapshot(const Situation& s) {
    std::string out = "n=" + std::to_string(s.height()) + "\n";
    for (const auto& p : s) out += std::to_string(p.size()) + "@" + std::to_string(p.start) + "\n";
    return out;
}

/// One-line diagram: `.` per free leaf, `[` + color letter per covered leaf + `]` per pebble.
/// {4@0, 1@4} at height 3 renders as `[BBBB][W]...`.
inline std::string render_unchecked(const Situation& s) {
    std::string out;
    const auto color = colors(s);
    Position cursor = 0;
    std::size_t k = 0;
    for (const auto& p : s) {
        if (p.start > cursor) out.append(p.start - cursor, '.');
        out += '[';
        out.append(p.size(), color_letter(color[k++]));
        out += ']';
        cursor = std::max(cursor, p.end());
    }
    if (cursor < s.capacity()) out.append(s.capacity() - cursor, '.');
    return out;
}

inline Expected<std::string> render(const Situation& s) {
    auto violations = validate(s);
    if (!violations.empty()) {
        return make_error(ErrorCode::invalid_situation, "cannot render: " + violations.front().describe());
    }
    return render_unchecked(s);
}

}  // namespace ovsf
