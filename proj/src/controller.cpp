#include "tot/controller.hpp"

#include <algorithm>

namespace tot {

ControlSignal rule_decide(CheckStatus status, int children_of_current, const ControllerConfig& cfg,
                          bool at_root) {
    if (at_root) return ControlSignal::stay();
    if (!status_is_valid(status)) return ControlSignal::backtrack(1);
    if (children_of_current >= cfg.child_budget) return ControlSignal::backtrack(1);
    return ControlSignal::stay();
}

std::vector<ControlSignal> candidate_actions(int depth, int max_backtrack) {
    std::vector<ControlSignal> cands{ControlSignal::stay()};
    for (int j = 1; j <= std::min(depth, max_backtrack); ++j)
        cands.push_back(ControlSignal::backtrack(j));
    return cands;
}

int sample_index(const std::vector<double>& probs, Rng& rng) {
    const double u = rng.unit();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;  // u landed in rounding slack
}

PolicyDecision policy_decide(const std::vector<Board>& window, bool checker_valid,
                             const net::ControllerParams& params, Rng& rng, int current_depth) {
    PolicyDecision d;
    d.candidates = candidate_actions(current_depth, params.cfg.max_backtrack);
    if (d.candidates.size() == 1) {
        // Single feasible action: probability 1, log-probability exactly 0.
        d.signal = d.candidates[0];
        d.taken = 0;
        d.logprob = 0.0;
        return d;
    }
    auto eval = net::controller_forward(const_cast<net::ControllerParams&>(params), d.candidates,
                                        checker_valid, window, /*with_grad=*/false);
    d.taken = sample_index(eval.probs, rng);
    d.signal = d.candidates[static_cast<std::size_t>(d.taken)];
    d.logprob = eval.logprobs[static_cast<std::size_t>(d.taken)];
    return d;
}

}  // namespace tot
