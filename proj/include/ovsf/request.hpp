#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ovsf/types.hpp"

namespace ovsf {

enum class RequestKind { insert, delete_level, delete_id };

struct Request {
    RequestKind kind = RequestKind::insert;
    Level level = 0;
    PebbleId id{};

    static Request insert(Level l) { return {RequestKind::insert, l, {}}; }
    static Request remove(Level l) { return {RequestKind::delete_level, l, {}}; }
    static Request remove_id(PebbleId id) { return {RequestKind::delete_id, 0, id}; }

    friend bool operator==(const Request&, const Request&) = default;
};

struct Move {
    PebbleId id{};
    Place from;
    Place to;

    friend bool operator==(const Move&, const Move&) = default;
};

/// Which branch of the insertion procedure handled a request.
enum class InsertCase {
    no_left_neighbor,     // nothing precedes the first free place
    left_black,           // left neighbor black: place directly
    white_small_left,     // white neighbor B, its left neighbor C smaller than the request
    rotation,             // c == a: A goes right after C, B right after A
    shuffle_white_close,  // c > a, pebble at the closing position is white
    shuffle_black_close,  // c > a, pebble at the closing position is black
};

inline const char* to_string(InsertCase c) {
    switch (c) {
        case InsertCase::no_left_neighbor: return "no_left_neighbor";
        case InsertCase::left_black: return "left_black";
        case InsertCase::white_small_left: return "white_small_left";
        case InsertCase::rotation: return "rotation";
        case InsertCase::shuffle_white_close: return "shuffle_white_close";
        case InsertCase::shuffle_black_close: return "shuffle_black_close";
    }
    return "?";
}

enum class DeleteExit { no_pebbles_right, does_not_fit };

inline const char* to_string(DeleteExit e) {
    return e == DeleteExit::no_pebbles_right ? "no_pebbles_right" : "does_not_fit";
}

/// One pass of the deletion loop that moved a pebble.
struct DeleteStep {
    Position gap_start = 0;  // i_t
    Level gap_level = 0;     // level of the virtual pebble A_t filling the gap
    Level moved_level = 0;   // level of the selected pebble X_t
    Position moved_from = 0; // j_t
    Color virtual_color = Color::black;  // color of X_t with A_t present
    bool swapped = false;

    friend bool operator==(const DeleteStep&, const DeleteStep&) = default;
};

/// Everything one request did to the assignment. Cost is the number of moved pebbles.
struct MoveLog {
    RequestKind kind = RequestKind::insert;
    Level level = 0;
    std::optional<Move> placed;     // new pebble; `from` equals `to`
    std::vector<Move> moved;        // one entry per pre-existing pebble that changed place
    std::optional<Pebble> removed;  // the physically removed pebble (delete)
    std::optional<Move> relabel;    // identity continuity for delete-by-id
    std::size_t iterations = 0;

    std::optional<InsertCase> insert_case;
    bool renamed = false;
    std::optional<DeleteExit> exit;
    std::vector<DeleteStep> steps;

    std::size_t cost() const { return moved.size(); }

    friend bool operator==(const MoveLog&, const MoveLog&) = default;
};

struct AllocatorOptions {
    /// Count the delete-by-id identity transfer as a reassignment.
    bool count_relabel = false;
    /// Mutation switches for sensitivity testing; never set in production use.
    bool skip_delete_swap = false;
    bool skip_insert_rename = false;
};

}  // namespace ovsf
