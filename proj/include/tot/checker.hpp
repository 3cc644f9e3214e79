#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "tot/board.hpp"

namespace tot {

struct OrderMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CheckStatus { ValidFinal, ValidIntermediate, Invalid, Unparseable };

std::string_view status_word(CheckStatus s);                 // "valid_final" etc., session log token
std::optional<CheckStatus> status_from_word(std::string_view w);

inline bool status_is_valid(CheckStatus s) {
    return s == CheckStatus::ValidFinal || s == CheckStatus::ValidIntermediate;
}

/// Checker verdict on one LLM response. `board` is absent iff Unparseable;
/// `reason` is set for Invalid and Unparseable.
struct CheckResult {
    CheckStatus status;
    std::optional<Board> board;
    std::string reason;
};

struct ExtractError {
    enum class Kind { NoJsonObject, MissingKey, MalformedGrid } kind;
    std::string detail;
};

// Pulls the proposed board out of an LLM response. Lenient by default: takes
// the first balanced {...} region that mentions a next_step key (quoted or
// bare), whose value may be a quoted or bare grid, with any surrounding
// prose. With strict=true the response must be exactly one well-formed JSON
// object with a quoted "next_step" string value (the simulated backend emits
// this form).
std::variant<Board, ExtractError> extract_step(std::string_view response, bool strict = false);

// Rule check of `proposed` against the puzzle clues and the parent snapshot.
// Invalid when any of, in order: a digit repeats in a row or column; a clue
// cell differs; a filled parent cell was changed or erased; no new cell is
// filled. Otherwise ValidFinal when the board is full, else ValidIntermediate.
// Throws OrderMismatch when the three boards disagree on order.
CheckResult validate(const Board& proposed, const Puzzle& puzzle, const Board& parent);

// extract_step + validate: the full checker step of the solve loop. Failures
// to extract become Unparseable.
CheckResult check_response(std::string_view response, const Puzzle& puzzle, const Board& parent,
                           bool strict = false);

}  // namespace tot
