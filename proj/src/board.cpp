#include "tot/board.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "tot/rng.hpp"

namespace tot {

int Board::empty_count() const {
    return static_cast<int>(std::count(cells_.begin(), cells_.end(), 0));
}

Puzzle Puzzle::make(Board clues, std::string description) {
    if (clues.order() == 0) throw InvalidPuzzle("puzzle has no board");
    if (clues.full()) throw InvalidPuzzle("puzzle has no empty cell to fill");
    return Puzzle{std::move(clues), std::move(description)};
}

namespace {

void skip_ws(std::string_view s, std::size_t& i) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r' || s[i] == '\n')) ++i;
}

void expect(std::string_view s, std::size_t& i, char c) {
    skip_ws(s, i);
    if (i >= s.size() || s[i] != c)
        throw MalformedGrid(std::string("expected '") + c + "' at offset " + std::to_string(i));
    ++i;
}

// cell := digit+ | '*' ; returns 0 for '*'
int parse_cell(std::string_view s, std::size_t& i) {
    skip_ws(s, i);
    if (i >= s.size()) throw MalformedGrid("unexpected end of grid");
    if (s[i] == '*') {
        ++i;
        return 0;
    }
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) throw MalformedGrid("bad cell token at offset " + std::to_string(i));
    long v = 0;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
        v = v * 10 + (s[i] - '0');
        if (v > 1000) throw MalformedGrid("cell value absurdly large");
        ++i;
    }
    return static_cast<int>(v);
}

}  // namespace

Board parse_board_prefix(std::string_view text, std::size_t& pos) {
    std::vector<std::vector<int>> rows;
    expect(text, pos, '[');
    while (true) {
        std::vector<int> row;
        expect(text, pos, '[');
        while (true) {
            row.push_back(parse_cell(text, pos));
            skip_ws(text, pos);
            if (pos < text.size() && text[pos] == ',') {
                ++pos;
                continue;
            }
            break;
        }
        expect(text, pos, ']');
        rows.push_back(std::move(row));
        skip_ws(text, pos);
        if (pos < text.size() && text[pos] == ',') {
            ++pos;
            continue;
        }
        break;
    }
    expect(text, pos, ']');

    const int n = static_cast<int>(rows.size());
    for (const auto& row : rows)
        if (static_cast<int>(row.size()) != n) throw MalformedGrid("grid is not square");

    Board b(n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            int v = rows[r][c];
            if (v != 0 && (v < 1 || v > n))
                throw DigitOutOfRange("digit " + std::to_string(v) + " out of range 1.." + std::to_string(n));
            b.set(r, c, v);
        }
    return b;
}

Board parse_board(std::string_view text) {
    std::size_t pos = 0;
    Board b = parse_board_prefix(text, pos);
    skip_ws(text, pos);
    if (pos != text.size()) throw MalformedGrid("trailing characters after grid");
    return b;
}

std::string render_board(const Board& b) {
    std::string out = "[";
    for (int r = 0; r < b.order(); ++r) {
        if (r > 0) out += ',';
        out += '[';
        for (int c = 0; c < b.order(); ++c) {
            if (c > 0) out += ',';
            if (b.filled(r, c))
                out += std::to_string(b.at(r, c));
            else
                out += '*';
        }
        out += ']';
    }
    out += ']';
    return out;
}

namespace {

bool row_col_consistent(const Board& b) {
    const int n = b.order();
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (!b.filled(r, c)) continue;
            const int v = b.at(r, c);
            for (int k = c + 1; k < n; ++k)
                if (b.at(r, k) == v) return false;
            for (int k = r + 1; k < n; ++k)
                if (b.at(k, c) == v) return false;
        }
    }
    return true;
}

bool placement_ok(const Board& b, int r, int c, int v) {
    for (int k = 0; k < b.order(); ++k) {
        if (b.at(r, k) == v) return false;
        if (b.at(k, c) == v) return false;
    }
    return true;
}

bool complete_from(Board& b, int cell) {
    const int n = b.order();
    while (cell < n * n && b.filled(cell / n, cell % n)) ++cell;
    if (cell == n * n) return true;
    const int r = cell / n, c = cell % n;
    for (int v = 1; v <= n; ++v) {
        if (!placement_ok(b, r, c, v)) continue;
        b.set(r, c, v);
        if (complete_from(b, cell + 1)) return true;
        b.clear(r, c);
    }
    return false;
}

}  // namespace

std::optional<Board> solve_oracle(const Board& b) {
    if (!row_col_consistent(b)) return std::nullopt;
    Board work = b;
    if (!complete_from(work, 0)) return std::nullopt;
    return work;
}

std::string describe_puzzle(const Board& clues) {
    const std::string n = std::to_string(clues.order());
    return "Please solve this " + n + "x" + n + " Sudoku puzzle " + render_board(clues) +
           " where * represents a cell to be filled";
}

std::pair<Puzzle, Board> generate_puzzle(int order, int blanks, std::uint64_t seed) {
    if (order < 2) throw std::invalid_argument("puzzle order must be >= 2");
    if (blanks <= 0 || blanks >= order * order)
        throw InvalidBlankCount("blanks must satisfy 0 < blanks < n*n, got " + std::to_string(blanks));

    Rng rng(seed_for(seed, "puzzle-gen"));

    std::vector<int> row_perm(order), col_perm(order), sym_perm(order);
    std::iota(row_perm.begin(), row_perm.end(), 0);
    std::iota(col_perm.begin(), col_perm.end(), 0);
    std::iota(sym_perm.begin(), sym_perm.end(), 1);
    rng.shuffle(row_perm);
    rng.shuffle(col_perm);
    rng.shuffle(sym_perm);

    Board solution(order);
    for (int r = 0; r < order; ++r)
        for (int c = 0; c < order; ++c)
            solution.set(r, c, sym_perm[(row_perm[r] + col_perm[c]) % order]);

    Board clues = solution;
    for (std::size_t cell : rng.sample_indices(static_cast<std::size_t>(order) * order,
                                               static_cast<std::size_t>(blanks)))
        clues.clear(static_cast<int>(cell) / order, static_cast<int>(cell) % order);

    return {Puzzle::make(clues, describe_puzzle(clues)), solution};
}

}  // namespace tot
