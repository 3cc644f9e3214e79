#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tot/board.hpp"
#include "tot/checker.hpp"

namespace tot {

struct UnknownNode : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct AtRoot : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using NodeId = int;

struct SearchNode {
    NodeId id = 0;
    std::optional<NodeId> parent;
    Board board;
    bool valid = true;  // checker verdict for the proposal that created this node
    int depth = 0;
    std::vector<NodeId> children;
};

/// The search tree of partially filled boards. `current` always points at a
/// valid node: invalid proposals are recorded as children (gray dead ends)
/// but never become current. Boards are stored by value, so a node's snapshot
/// is immutable once created and backtracking retrieves it bit-for-bit.
class SearchTree {
public:
    explicit SearchTree(Board root_board);

    const SearchNode& node(NodeId id) const;
    NodeId root() const { return 0; }
    NodeId current() const { return current_; }
    const Board& current_board() const { return node(current_).board; }
    int current_depth() const { return node(current_).depth; }
    std::size_t size() const { return nodes_.size(); }

    // Appends a child under parent_id. A valid child becomes current (and is
    // appended to the visit sequence); an invalid one leaves current alone.
    NodeId add_child(NodeId parent_id, Board board, bool valid);

    // Moves current to its levels-th ancestor, clamped at the root. Throws
    // AtRoot when current is already the root.
    NodeId backtrack(int levels);

    // The last k+1 boards in chronological visit order (including re-visits
    // caused by backtracking); a shorter prefix when fewer visits happened.
    std::vector<Board> window(int k) const;
    const std::vector<NodeId>& visit_history() const { return visits_; }

private:
    std::vector<SearchNode> nodes_;
    NodeId current_ = 0;
    std::vector<NodeId> visits_;
};

struct Exchange {
    int round = 0;  // 1-based, contiguous
    std::string prompt;
    std::string response;
    CheckStatus status = CheckStatus::Unparseable;
    NodeId node = 0;  // node created by this exchange, or the node it happened at
};

/// Ordered record of every prompter <-> LLM exchange in one run.
class Transcript {
public:
    int record_exchange(std::string prompt, std::string response, CheckStatus status, NodeId node);

    const std::vector<Exchange>& exchanges() const { return exchanges_; }
    std::size_t size() const { return exchanges_.size(); }

    // Line-oriented session log:
    //   ROUND <i> | PROMPT <base64> | RESPONSE <base64> | STATUS <word> | NODE <id>
    std::string serialize() const;
    static Transcript parse(const std::string& log);  // throws std::invalid_argument

private:
    std::vector<Exchange> exchanges_;
};

}  // namespace tot
