#pragma once

#include <functional>
#include <vector>

#include "tot/backend.hpp"
#include "tot/engine.hpp"
#include "tot/policy_net.hpp"
#include "tot/prompter.hpp"
#include "tot/trajectory.hpp"

namespace tot {

struct TrainConfig {
    std::vector<Puzzle> train_set;
    int epochs = 1;      // N
    double alpha = 0.05;
    int max_rounds = 100;  // K per episode
    std::uint64_t seed = 0;

    BackendConfig backend;  // sim; training never talks to a live endpoint
    ControllerConfig controller_cfg;
    net::NetConfig net_cfg;

    bool policy_controller = true;  // wire the policy controller into episodes
    bool policy_prompter = true;    // wire the policy prompter into episodes
    ExamplePool pool;               // candidates for the policy prompter

    // Optional moving-average reward baseline (variance reduction), off by default.
    bool use_baseline = false;
    double baseline_beta = 0.9;
};

struct EpisodeResult {
    Trajectory trajectory;
    int reward = -1;  // +1 iff the puzzle was solved within K rounds
};

// One run of the system on one puzzle with the policy components wired in.
EpisodeResult run_episode(const Puzzle& puzzle, net::ControllerParams& controller,
                          net::PrompterParams& prompter, const TrainConfig& cfg,
                          std::uint64_t episode_seed);

// REINFORCE: w += alpha * r * sum of grad log pi(taken) over the trajectory's
// decisions owned by this policy. The other policy's parameters are untouched.
void reinforce_update(net::ControllerParams& params, const Trajectory& trajectory, double reward,
                      double alpha);
void reinforce_update(net::PrompterParams& params, const Trajectory& trajectory, double reward,
                      double alpha);

// Re-evaluates a trajectory's total log-probability for one policy under the
// current parameters (used to verify update direction).
double replay_logprob(net::ControllerParams& params, const Trajectory& trajectory);
double replay_logprob(net::PrompterParams& params, const Trajectory& trajectory);

struct TrainResult {
    net::ControllerParams controller;
    net::PrompterParams prompter;
    std::vector<double> epoch_mean_reward;
    std::string curve_csv() const;  // epoch,mean_reward
};

// Episode source, injectable for toy environments in tests.
using EpisodeRunner = std::function<EpisodeResult(const Puzzle&, net::ControllerParams&,
                                                  net::PrompterParams&, std::uint64_t seed)>;

// Alternating REINFORCE: epochs run 1..N; an even epoch updates the
// controller policy, an odd one the prompter policy; the other is fixed.
// Each epoch runs one episode per training puzzle, one update per episode.
TrainResult train(const TrainConfig& cfg, const EpisodeRunner& runner = nullptr);

}  // namespace tot
