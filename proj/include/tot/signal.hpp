#pragma once

#include <stdexcept>
#include <string>

namespace tot {

/// The controller's action: continue from the current node, or return to an
/// ancestor `levels` up the tree.
struct ControlSignal {
    enum class Action { Stay, Backtrack };

    Action action = Action::Stay;
    int levels = 0;  // >= 1 iff Backtrack

    static ControlSignal stay() { return {Action::Stay, 0}; }
    static ControlSignal backtrack(int levels) {
        if (levels < 1) throw std::invalid_argument("backtrack levels must be >= 1");
        return {Action::Backtrack, levels};
    }

    bool is_backtrack() const { return action == Action::Backtrack; }
    bool operator==(const ControlSignal&) const = default;

    std::string str() const {
        return is_backtrack() ? "backtrack(" + std::to_string(levels) + ")" : "stay";
    }
};

struct ControllerConfig {
    int child_budget = 5;   // C: children explored per node before forced backtracking
    int max_backtrack = 3;  // L: deepest single backtrack
    int history_k = 3;      // k: policy window sees the last k+1 visited nodes
};

}  // namespace tot
