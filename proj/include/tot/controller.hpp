#pragma once

#include <vector>

#include "tot/board.hpp"
#include "tot/checker.hpp"
#include "tot/policy_net.hpp"
#include "tot/rng.hpp"
#include "tot/signal.hpp"

namespace tot {

// Rule-based controller. Backtrack one level when the last proposal was
// rejected (abandoning it) or when the current node has already spawned
// child_budget children; at the root there is nowhere to go, so the answer
// is always Stay and the root keeps growing new children.
ControlSignal rule_decide(CheckStatus status, int children_of_current, const ControllerConfig& cfg,
                          bool at_root);

// Feasible actions at a given depth: Stay plus Backtrack(1..min(L, depth)).
std::vector<ControlSignal> candidate_actions(int depth, int max_backtrack);

struct PolicyDecision {
    ControlSignal signal;
    double logprob = 0.0;
    std::vector<ControlSignal> candidates;
    int taken = 0;
};

// Policy controller: scores the feasible actions against the recent visit
// window (params.cfg.history_k) and the checker verdict, then samples one.
// Deterministic given (params, window, rng state).
PolicyDecision policy_decide(const std::vector<Board>& window, bool checker_valid,
                             const net::ControllerParams& params, Rng& rng, int current_depth);

// Samples an index from a probability vector using one rng.unit() draw.
int sample_index(const std::vector<double>& probs, Rng& rng);

}  // namespace tot
