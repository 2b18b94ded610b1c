#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>

namespace ovsf {

/// Tree level; leaves are level 0, a level-l place spans 2^l leaves.
using Level = int;

/// Leaf index in [0, 2^n).
using Position = std::uint64_t;

/// Largest supported tree height. Positions and bandwidth fit in 64 bits with room to spare.
inline constexpr Level kMaxHeight = 40;

enum class PebbleId : std::uint64_t {};

constexpr std::uint64_t to_underlying(PebbleId id) noexcept { return static_cast<std::uint64_t>(id); }

constexpr std::uint64_t size_of(Level level) noexcept { return std::uint64_t{1} << level; }

constexpr Position align_up(Position p, std::uint64_t size) noexcept { return (p + size - 1) & ~(size - 1); }

enum class Color : std::uint8_t { black, white };

constexpr char color_letter(Color c) noexcept { return c == Color::black ? 'B' : 'W'; }

/// Aligned interval [start, start + 2^level).
struct Place {
    Level level = 0;
    Position start = 0;

    constexpr std::uint64_t size() const noexcept { return size_of(level); }
    constexpr Position end() const noexcept { return start + size(); }
    constexpr bool aligned() const noexcept { return start % size() == 0; }
    constexpr bool contains(const Place& other) const noexcept {
        return start <= other.start && other.end() <= end();
    }
    constexpr bool overlaps(const Place& other) const noexcept {
        return start < other.end() && other.start < end();
    }

    friend constexpr auto operator<=>(const Place&, const Place&) = default;
};

struct Pebble {
    PebbleId id{};
    Level level = 0;
    Position start = 0;

    constexpr std::uint64_t size() const noexcept { return size_of(level); }
    constexpr Position end() const noexcept { return start + size(); }
    constexpr Place place() const noexcept { return {level, start}; }

    friend constexpr bool operator==(const Pebble&, const Pebble&) = default;
};

enum class ErrorCode {
    unknown_id,
    level_out_of_range,
    insufficient_bandwidth,
    no_such_level,
    invalid_situation,
    placement_conflict,
    parse_error,
    inadmissible,
};

inline const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::unknown_id: return "unknown_id";
        case ErrorCode::level_out_of_range: return "level_out_of_range";
        case ErrorCode::insufficient_bandwidth: return "insufficient_bandwidth";
        case ErrorCode::no_such_level: return "no_such_level";
        case ErrorCode::invalid_situation: return "invalid_situation";
        case ErrorCode::placement_conflict: return "placement_conflict";
        case ErrorCode::parse_error: return "parse_error";
        case ErrorCode::inadmissible: return "inadmissible";
    }
    return "unknown";
}

struct Error {
    ErrorCode code;
    std::string message;
};

/// Value-or-error. Minimal stand-in for std::expected until the toolchain moves to C++23.
template <typename T>
class Expected {
public:
    Expected(T value) : state_(std::move(value)) {}
    Expected(Error error) : state_(std::move(error)) {}

    bool has_value() const noexcept { return state_.index() == 0; }
    explicit operator bool() const noexcept { return has_value(); }

    T& value() & { return std::get<0>(state_); }
    const T& value() const& { return std::get<0>(state_); }
    T&& value() && { return std::get<0>(std::move(state_)); }
    T& operator*() & { return value(); }
    const T& operator*() const& { return value(); }
    T* operator->() { return &value(); }
    const T* operator->() const { return &value(); }

    const Error& error() const { return std::get<1>(state_); }

private:
    std::variant<T, Error> state_;
};

/// Expected<void> equivalent.
using Status = Expected<std::monostate>;

inline Status ok() { return std::monostate{}; }

inline Error make_error(ErrorCode code, std::string message) { return Error{code, std::move(message)}; }

}  // namespace ovsf
