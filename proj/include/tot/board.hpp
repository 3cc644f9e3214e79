#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tot {

struct MalformedGrid : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DigitOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidBlankCount : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidPuzzle : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An n-by-n grid; cell value 0 means empty, otherwise a digit in [1, n].
/// Rule checking lives in the checker; a Board may freely hold duplicates.
class Board {
public:
    Board() = default;
    explicit Board(int order) : order_(order), cells_(static_cast<std::size_t>(order) * order, 0) {
        if (order < 1) throw std::invalid_argument("board order must be >= 1");
    }

    int order() const { return order_; }
    int at(int r, int c) const { return cells_[idx(r, c)]; }
    bool filled(int r, int c) const { return at(r, c) != 0; }

    void set(int r, int c, int v) {
        if (v < 0 || v > order_) throw DigitOutOfRange("digit " + std::to_string(v) + " out of range for order " + std::to_string(order_));
        cells_[idx(r, c)] = v;
    }
    void clear(int r, int c) { cells_[idx(r, c)] = 0; }

    int empty_count() const;
    int filled_count() const { return order_ * order_ - empty_count(); }
    bool full() const { return empty_count() == 0; }

    bool operator==(const Board&) const = default;

private:
    std::size_t idx(int r, int c) const {
        if (r < 0 || r >= order_ || c < 0 || c >= order_) throw std::out_of_range("board cell index");
        return static_cast<std::size_t>(r) * order_ + c;
    }

    int order_ = 0;
    std::vector<int> cells_;
};

/// The immutable problem statement: initial givens plus the user's text.
struct Puzzle {
    Board clues;
    std::string description;

    // Throws InvalidPuzzle unless clues has at least one empty cell.
    static Puzzle make(Board clues, std::string description);
};

// Grammar (bit-exact): grid := '[' row (',' row)* ']'
//                      row  := '[' cell (',' cell)* ']'
//                      cell := digit+ | '*'
// Whitespace between tokens is ignored. The whole text must be one grid.
Board parse_board(std::string_view text);

// Internal variant for embedded grids: parses a grid starting at text[pos],
// advancing pos past it. Same errors as parse_board.
Board parse_board_prefix(std::string_view text, std::size_t& pos);

// Inverse of parse_board: no whitespace, '*' for empty cells.
std::string render_board(const Board& b);

// Exhaustive backtracking completion: every row and column a permutation of
// 1..n, extending b's filled cells. Deterministic: first empty cell in
// row-major order, digits tried ascending. Returns nullopt when no completion
// exists (including when b itself already violates row/column rules).
std::optional<Board> solve_oracle(const Board& b);

// The paper-style user input line for a clue grid.
std::string describe_puzzle(const Board& clues);

// Random Latin square of order n (cyclic square, then rows/columns/symbols
// permuted under the seed) with `blanks` cells removed uniformly at random.
// Deterministic in seed. Throws InvalidBlankCount unless 0 < blanks < n*n.
std::pair<Puzzle, Board> generate_puzzle(int order, int blanks, std::uint64_t seed);

}  // namespace tot
