#pragma once

#include <vector>

#include "tot/board.hpp"
#include "tot/policy_net.hpp"
#include "tot/signal.hpp"

namespace tot {

/// One sampled policy decision, with everything needed to replay its forward
/// pass for gradient computation (standard episodic REINFORCE).
struct DecisionRecord {
    enum class Owner { Controller, Prompter };

    Owner owner = Owner::Controller;
    std::vector<Board> window;  // visit window at decision time

    // Controller decisions
    bool checker_valid = true;
    std::vector<ControlSignal> candidates;

    // Prompter decisions: the token sequences still available at this draw
    std::vector<net::TokenSeq> example_candidates;

    int taken = 0;  // index into candidates / example_candidates
    double logprob = 0.0;
};

struct Trajectory {
    std::vector<DecisionRecord> decisions;

    double total_logprob(DecisionRecord::Owner owner) const {
        double s = 0.0;
        for (const auto& d : decisions)
            if (d.owner == owner) s += d.logprob;
        return s;
    }
};

}  // namespace tot
