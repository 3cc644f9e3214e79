#include "tot/trainer.hpp"

#include <type_traits>

#include "tot/util.hpp"

namespace tot {

EpisodeResult run_episode(const Puzzle& puzzle, net::ControllerParams& controller,
                          net::PrompterParams& prompter, const TrainConfig& cfg,
                          std::uint64_t episode_seed) {
    EpisodeResult ep;
    BackendConfig bc = cfg.backend;
    bc.kind = BackendConfig::Kind::Sim;
    bc.seed = episode_seed;
    auto backend = make_backend(bc);

    SolverOptions opts;
    opts.max_rounds = cfg.max_rounds;
    opts.controller = cfg.controller_cfg;
    opts.seed = episode_seed;
    opts.trajectory = &ep.trajectory;
    if (cfg.policy_controller) opts.controller_params = &controller;
    if (cfg.policy_prompter) {
        opts.prompter_params = &prompter;
        opts.example_pool = &cfg.pool;
    }

    RunOutcome outcome = solve(puzzle, *backend, opts);
    ep.reward = outcome.reward;
    return ep;
}

namespace {

template <typename Params>
int accumulate_trajectory_grads(Params& params, const Trajectory& trajectory,
                                DecisionRecord::Owner owner) {
    int used = 0;
    for (const DecisionRecord& dec : trajectory.decisions) {
        if (dec.owner != owner) continue;
        ++used;
        if constexpr (std::is_same_v<Params, net::ControllerParams>) {
            auto eval = net::controller_forward(params, dec.candidates, dec.checker_valid,
                                                dec.window, /*with_grad=*/true);
            net::accumulate_grad_log_prob(eval, dec.taken);
        } else {
            auto eval = net::prompter_forward(params, dec.example_candidates, dec.window,
                                              /*with_grad=*/true);
            net::accumulate_grad_log_prob(eval, dec.taken);
        }
    }
    return used;
}

template <typename Params>
void update_impl(Params& params, const Trajectory& trajectory, double reward, double alpha,
                 DecisionRecord::Owner owner) {
    params.p.zero_grads();
    if (accumulate_trajectory_grads(params, trajectory, owner) == 0) return;
    params.p.apply_gradient(alpha * reward);
}

template <typename Params>
double replay_impl(Params& params, const Trajectory& trajectory, DecisionRecord::Owner owner) {
    double total = 0.0;
    for (const DecisionRecord& dec : trajectory.decisions) {
        if (dec.owner != owner) continue;
        if constexpr (std::is_same_v<Params, net::ControllerParams>) {
            auto eval = net::controller_forward(params, dec.candidates, dec.checker_valid,
                                                dec.window, /*with_grad=*/false);
            total += eval.logprobs[static_cast<std::size_t>(dec.taken)];
        } else {
            auto eval = net::prompter_forward(params, dec.example_candidates, dec.window,
                                              /*with_grad=*/false);
            total += eval.logprobs[static_cast<std::size_t>(dec.taken)];
        }
    }
    return total;
}

}  // namespace

void reinforce_update(net::ControllerParams& params, const Trajectory& trajectory, double reward,
                      double alpha) {
    update_impl(params, trajectory, reward, alpha, DecisionRecord::Owner::Controller);
}

void reinforce_update(net::PrompterParams& params, const Trajectory& trajectory, double reward,
                      double alpha) {
    update_impl(params, trajectory, reward, alpha, DecisionRecord::Owner::Prompter);
}

double replay_logprob(net::ControllerParams& params, const Trajectory& trajectory) {
    return replay_impl(params, trajectory, DecisionRecord::Owner::Controller);
}

double replay_logprob(net::PrompterParams& params, const Trajectory& trajectory) {
    return replay_impl(params, trajectory, DecisionRecord::Owner::Prompter);
}

std::string TrainResult::curve_csv() const {
    std::string out = "epoch,mean_reward\n";
    for (std::size_t i = 0; i < epoch_mean_reward.size(); ++i)
        out += std::to_string(i + 1) + "," + fmt_double(epoch_mean_reward[i]) + "\n";
    return out;
}

TrainResult train(const TrainConfig& cfg, const EpisodeRunner& runner) {
    if (cfg.epochs < 1) throw std::invalid_argument("epochs must be >= 1");
    if (cfg.alpha <= 0.0) throw std::invalid_argument("alpha must be > 0");

    TrainResult result{net::ControllerParams::init(cfg.net_cfg, seed_for(cfg.seed, "init-rho")),
                       net::PrompterParams::init(cfg.net_cfg, seed_for(cfg.seed, "init-theta")),
                       {}};

    double baseline = 0.0;
    bool baseline_primed = false;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        // "pi_w <- pi_t if epoch is even, pi_p otherwise"; epochs start at 1.
        const bool update_controller = epoch % 2 == 0;
        double reward_sum = 0.0;

        for (std::size_t i = 0; i < cfg.train_set.size(); ++i) {
            const std::uint64_t ep_seed = seed_for(
                cfg.seed, "episode",
                static_cast<std::uint64_t>(epoch - 1) * cfg.train_set.size() + i);
            EpisodeResult ep =
                runner ? runner(cfg.train_set[i], result.controller, result.prompter, ep_seed)
                       : run_episode(cfg.train_set[i], result.controller, result.prompter, cfg,
                                     ep_seed);
            reward_sum += ep.reward;

            double advantage = ep.reward;
            if (cfg.use_baseline) {
                if (baseline_primed) advantage -= baseline;
                baseline = baseline_primed
                               ? cfg.baseline_beta * baseline + (1.0 - cfg.baseline_beta) * ep.reward
                               : ep.reward;
                baseline_primed = true;
            }

            if (update_controller)
                reinforce_update(result.controller, ep.trajectory, advantage, cfg.alpha);
            else
                reinforce_update(result.prompter, ep.trajectory, advantage, cfg.alpha);
        }

        result.epoch_mean_reward.push_back(
            cfg.train_set.empty() ? 0.0 : reward_sum / static_cast<double>(cfg.train_set.size()));
    }
    return result;
}

}  // namespace tot
