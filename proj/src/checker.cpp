#include "tot/checker.hpp"

#include <cctype>
#include <utility>
#include <vector>

#include <json.hpp>

namespace tot {

std::string_view status_word(CheckStatus s) {
    switch (s) {
        case CheckStatus::ValidFinal: return "valid_final";
        case CheckStatus::ValidIntermediate: return "valid_intermediate";
        case CheckStatus::Invalid: return "invalid";
        case CheckStatus::Unparseable: return "unparseable";
    }
    return "unknown";
}

std::optional<CheckStatus> status_from_word(std::string_view w) {
    if (w == "valid_final") return CheckStatus::ValidFinal;
    if (w == "valid_intermediate") return CheckStatus::ValidIntermediate;
    if (w == "invalid") return CheckStatus::Invalid;
    if (w == "unparseable") return CheckStatus::Unparseable;
    return std::nullopt;
}

namespace {

// Balanced {...} regions, left to right, ignoring braces inside quoted strings.
std::vector<std::pair<std::size_t, std::size_t>> brace_regions(std::string_view s) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '{') {
            ++i;
            continue;
        }
        int depth = 0;
        bool in_str = false, esc = false;
        std::size_t start = i, j = i;
        for (; j < s.size(); ++j) {
            char c = s[j];
            if (in_str) {
                if (esc)
                    esc = false;
                else if (c == '\\')
                    esc = true;
                else if (c == '"')
                    in_str = false;
                continue;
            }
            if (c == '"') {
                in_str = true;
            } else if (c == '{') {
                ++depth;
            } else if (c == '}') {
                --depth;
                if (depth == 0) break;
            }
        }
        if (j < s.size()) {
            out.emplace_back(start, j + 1);
            i = j + 1;
        } else {
            break;  // unbalanced tail; no more complete regions
        }
    }
    return out;
}

// Position right after a next_step key (optionally quoted) and its colon,
// or npos when the region has no such key.
std::size_t find_value_pos(std::string_view region) {
    std::size_t k = region.find("next_step");
    while (k != std::string_view::npos) {
        std::size_t p = k + 9;
        while (p < region.size() && std::isspace(static_cast<unsigned char>(region[p]))) ++p;
        if (p < region.size() && region[p] == '"') ++p;  // closing quote of a quoted key
        while (p < region.size() && std::isspace(static_cast<unsigned char>(region[p]))) ++p;
        if (p < region.size() && region[p] == ':') return p + 1;
        k = region.find("next_step", k + 1);
    }
    return std::string_view::npos;
}

std::variant<Board, ExtractError> extract_lenient(std::string_view response) {
    auto regions = brace_regions(response);
    if (regions.empty())
        return ExtractError{ExtractError::Kind::NoJsonObject, "no balanced {...} object in response"};

    for (auto [beg, end] : regions) {
        std::string_view region = response.substr(beg, end - beg);
        std::size_t vp = find_value_pos(region);
        if (vp == std::string_view::npos) continue;

        while (vp < region.size() && std::isspace(static_cast<unsigned char>(region[vp]))) ++vp;
        bool quoted = vp < region.size() && region[vp] == '"';
        if (quoted) ++vp;
        try {
            std::size_t pos = vp;
            Board b = parse_board_prefix(region, pos);
            return b;
        } catch (const DigitOutOfRange& e) {
            return ExtractError{ExtractError::Kind::MalformedGrid, e.what()};
        } catch (const MalformedGrid& e) {
            return ExtractError{ExtractError::Kind::MalformedGrid, e.what()};
        }
    }
    return ExtractError{ExtractError::Kind::MissingKey, "no next_step key in any {...} object"};
}

std::variant<Board, ExtractError> extract_strict(std::string_view response) {
    nlohmann::json j = nlohmann::json::parse(response, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        return ExtractError{ExtractError::Kind::NoJsonObject, "response is not a JSON object"};
    if (!j.contains("next_step") || !j["next_step"].is_string())
        return ExtractError{ExtractError::Kind::MissingKey, "no next_step string in JSON object"};
    try {
        return parse_board(j["next_step"].get<std::string>());
    } catch (const std::runtime_error& e) {
        return ExtractError{ExtractError::Kind::MalformedGrid, e.what()};
    }
}

}  // namespace

std::variant<Board, ExtractError> extract_step(std::string_view response, bool strict) {
    return strict ? extract_strict(response) : extract_lenient(response);
}

CheckResult validate(const Board& proposed, const Puzzle& puzzle, const Board& parent) {
    const int n = puzzle.clues.order();
    if (proposed.order() != n || parent.order() != n)
        throw OrderMismatch("board orders disagree: proposed " + std::to_string(proposed.order()) +
                            ", clues " + std::to_string(n) + ", parent " + std::to_string(parent.order()));

    // (a) duplicate digit in a row or column (1-indexed in reasons)
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (!proposed.filled(r, c)) continue;
            const int v = proposed.at(r, c);
            for (int k = c + 1; k < n; ++k)
                if (proposed.at(r, k) == v)
                    return {CheckStatus::Invalid, proposed,
                            "duplicate " + std::to_string(v) + " in row " + std::to_string(r + 1)};
            for (int k = r + 1; k < n; ++k)
                if (proposed.at(k, c) == v)
                    return {CheckStatus::Invalid, proposed,
                            "duplicate " + std::to_string(v) + " in column " + std::to_string(c + 1)};
        }

    // (b) clue preservation
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (puzzle.clues.filled(r, c) && proposed.at(r, c) != puzzle.clues.at(r, c))
                return {CheckStatus::Invalid, proposed,
                        "clue cell (" + std::to_string(r + 1) + "," + std::to_string(c + 1) +
                            ") must stay " + std::to_string(puzzle.clues.at(r, c))};

    // (c) monotone extension of the parent snapshot
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (parent.filled(r, c) && proposed.at(r, c) != parent.at(r, c))
                return {CheckStatus::Invalid, proposed,
                        "previously filled cell (" + std::to_string(r + 1) + "," +
                            std::to_string(c + 1) + ") was changed or erased"};

    // (d) must extend strictly
    if (proposed.filled_count() == parent.filled_count())
        return {CheckStatus::Invalid, proposed, "no new cell filled"};

    if (proposed.full()) return {CheckStatus::ValidFinal, proposed, ""};
    return {CheckStatus::ValidIntermediate, proposed, ""};
}

CheckResult check_response(std::string_view response, const Puzzle& puzzle, const Board& parent,
                           bool strict) {
    auto extracted = extract_step(response, strict);
    if (std::holds_alternative<ExtractError>(extracted)) {
        const auto& err = std::get<ExtractError>(extracted);
        return {CheckStatus::Unparseable, std::nullopt, err.detail};
    }
    Board b = std::get<Board>(std::move(extracted));
    if (b.order() != puzzle.clues.order())
        return {CheckStatus::Invalid, b,
                "proposed grid has order " + std::to_string(b.order()) + ", expected " +
                    std::to_string(puzzle.clues.order())};
    return validate(b, puzzle, parent);
}

}  // namespace tot
