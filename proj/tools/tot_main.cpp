// tot - Tree-of-Thought Sudoku solver CLI.
//
// Subcommands:
//   solve  one puzzle with the tot loop or a zs/os/fs baseline
//   bench  a suite file across modes, with CSV output
//   train  the policy controller/prompter with alternating REINFORCE
//   gen    seeded puzzle suites
//
// Exit codes: 0 solved/completed, 1 unsolved, 2 usage error.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tot/engine.hpp"
#include "tot/trainer.hpp"
#include "tot/util.hpp"

namespace {

int write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        std::cerr << "error: cannot write " << path << "\n";
        return 1;
    }
    f << content;
    return 0;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct BackendFlags {
    std::string backend = "sim";
    double error_rate = 0.0;
    int fill_max = 1;
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-3.5-turbo";
    double temperature = 1.0;
    int timeout = 30;
    int retries = 3;

    void attach(CLI::App* cmd) {
        cmd->add_option("--backend", backend, "LLM backend")->check(CLI::IsMember({"sim", "http"}));
        cmd->add_option("--error-rate", error_rate, "sim: corruption probability")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--fill-max", fill_max, "sim: max cells per step")->check(CLI::PositiveNumber);
        cmd->add_option("--endpoint", endpoint, "http: OpenAI-compatible base URL");
        cmd->add_option("--model", model, "http: model name");
        cmd->add_option("--temperature", temperature, "http: sampling temperature");
        cmd->add_option("--timeout", timeout, "http: per-request timeout (s)");
        cmd->add_option("--retries", retries, "http: retry count for 429/5xx");
    }

    tot::BackendConfig config(std::uint64_t seed) const {
        tot::BackendConfig cfg;
        cfg.kind = backend == "http" ? tot::BackendConfig::Kind::Http : tot::BackendConfig::Kind::Sim;
        cfg.error_rate = error_rate;
        cfg.fill_max = fill_max;
        cfg.seed = seed;
        cfg.endpoint = endpoint;
        cfg.model = model;
        cfg.temperature = temperature;
        cfg.timeout_sec = timeout;
        cfg.retries = retries;
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tree-of-Thought Sudoku solver"};
    app.require_subcommand(1);

    // --- solve ---------------------------------------------------------
    auto* solve_cmd = app.add_subcommand("solve", "solve one puzzle");
    std::string puzzle_text, mode_str = "tot", controller_str = "rule", checkpoint_in, prompts_dir,
                transcript_out;
    std::uint64_t seed = 0;
    int max_rounds = 100, examples = 0;
    tot::ControllerConfig ctrl_cfg;
    BackendFlags solve_backend;
    solve_cmd->add_option("--puzzle", puzzle_text, "puzzle grid, e.g. [[1,*],[*,2]]")->required();
    solve_cmd->add_option("--mode", mode_str, "solver mode")
        ->check(CLI::IsMember({"zs", "os", "fs", "tot"}));
    solve_cmd->add_option("--max-rounds", max_rounds, "K: conversation round budget")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--seed", seed, "master seed");
    solve_cmd->add_option("--controller", controller_str, "tot controller variant")
        ->check(CLI::IsMember({"rule", "policy"}));
    solve_cmd->add_option("--child-budget", ctrl_cfg.child_budget, "C: children per node")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--backtrack-depth", ctrl_cfg.max_backtrack, "L: deepest backtrack")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--history-k", ctrl_cfg.history_k, "k: policy window length minus one");
    solve_cmd->add_option("--examples", examples, "in-context examples per prompt");
    solve_cmd->add_option("--checkpoint", checkpoint_in, "policy checkpoint to load");
    solve_cmd->add_option("--prompts-dir", prompts_dir, "directory of template overrides");
    solve_cmd->add_option("--transcript", transcript_out, "write the session log here");
    solve_backend.attach(solve_cmd);

    // --- bench ---------------------------------------------------------
    auto* bench_cmd = app.add_subcommand("bench", "run a benchmark suite");
    std::vector<std::string> suite_files;
    std::string modes_str = "zs,os,fs,tot", csv_out;
    std::uint64_t bench_seed = 0;
    int bench_rounds = 100, jobs = 1;
    BackendFlags bench_backend;
    bench_cmd->add_option("--suite", suite_files, "suite file(s), one grid per line")->required();
    bench_cmd->add_option("--modes", modes_str, "comma-separated modes");
    bench_cmd->add_option("--max-rounds", bench_rounds, "K per tot run")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench_seed, "master seed");
    bench_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--csv", csv_out, "write results CSV here");
    bench_backend.attach(bench_cmd);

    // --- train ---------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "train the policy networks");
    std::string train_set_file, checkpoint_out, curve_out;
    tot::TrainConfig tcfg;
    train_cmd->add_option("--train-set", train_set_file, "suite file of training puzzles")
        ->required();
    train_cmd->add_option("--epochs", tcfg.epochs, "N training epochs")->check(CLI::PositiveNumber);
    train_cmd->add_option("--alpha", tcfg.alpha, "learning rate");
    train_cmd->add_option("--max-rounds", tcfg.max_rounds, "K per episode")
        ->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", tcfg.seed, "master seed");
    train_cmd->add_option("--error-rate", tcfg.backend.error_rate, "sim corruption probability")
        ->check(CLI::Range(0.0, 1.0));
    train_cmd->add_option("--checkpoint", checkpoint_out, "write trained parameters here");
    train_cmd->add_option("--curve", curve_out, "write per-epoch mean-reward CSV here");
    train_cmd->add_flag("--baseline", tcfg.use_baseline, "moving-average reward baseline");

    // --- gen -----------------------------------------------------------
    auto* gen_cmd = app.add_subcommand("gen", "generate a puzzle suite");
    int order = 4, blanks = 0, count = 10;
    std::uint64_t gen_seed = 0;
    gen_cmd->add_option("--order", order, "board order n")->check(CLI::Range(2, 9));
    gen_cmd->add_option("--blanks", blanks, "cells to blank (default n*n/2)");
    gen_cmd->add_option("--count", count, "number of puzzles")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen_seed, "master seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (solve_cmd->parsed()) {
            tot::Board clues = tot::parse_board(puzzle_text);
            tot::Puzzle puzzle = tot::Puzzle::make(clues, tot::describe_puzzle(clues));
            auto mode = *tot::mode_from_name(mode_str);

            tot::PromptLibrary prompts = prompts_dir.empty()
                                             ? tot::PromptLibrary::defaults()
                                             : tot::PromptLibrary::load_dir(prompts_dir);
            tot::RunOutcome outcome;
            if (mode == tot::SolveMode::Tot) {
                tot::SolverOptions opts;
                opts.max_rounds = max_rounds;
                opts.controller = ctrl_cfg;
                opts.seed = seed;
                opts.prompts = &prompts;
                opts.plain_examples = examples;

                tot::net::NetConfig net_cfg;
                net_cfg.max_backtrack = ctrl_cfg.max_backtrack;
                net_cfg.history_k = ctrl_cfg.history_k;
                auto controller_params = tot::net::ControllerParams::init(net_cfg, seed);
                auto prompter_params = tot::net::PrompterParams::init(net_cfg, seed);
                if (!checkpoint_in.empty())
                    tot::net::load_checkpoint(read_file(checkpoint_in), controller_params,
                                              prompter_params);
                tot::ExamplePool pool;
                if (examples > 0 || controller_str == "policy") {
                    pool = tot::ExamplePool::generate(8, clues.order(), seed, examples);
                    opts.example_pool = &pool;
                }
                if (controller_str == "policy") {
                    opts.controller_params = &controller_params;
                    if (examples > 0) opts.prompter_params = &prompter_params;
                }

                auto backend = tot::make_backend(solve_backend.config(seed));
                outcome = tot::solve(puzzle, *backend, opts);
            } else {
                outcome = tot::single_shot_solve(puzzle, mode, solve_backend.config(seed), seed,
                                                 &prompts);
            }

            if (!transcript_out.empty() &&
                write_file(transcript_out, outcome.transcript.serialize()) != 0)
                return 2;
            if (outcome.solved) {
                std::cout << "solved in " << outcome.rounds_used
                          << " round(s): " << tot::render_board(*outcome.solution) << "\n";
                return 0;
            }
            std::cout << "unsolved after " << outcome.rounds_used << " round(s)\n";
            return 1;
        }

        if (bench_cmd->parsed()) {
            std::vector<tot::NamedSuite> suites;
            for (const std::string& path : suite_files) {
                std::string name = path;
                if (auto slash = name.find_last_of('/'); slash != std::string::npos)
                    name = name.substr(slash + 1);
                if (auto dot = name.find_last_of('.'); dot != std::string::npos)
                    name = name.substr(0, dot);
                suites.push_back(tot::NamedSuite{name, tot::load_suite(path)});
            }
            std::vector<tot::SolveMode> modes;
            for (const std::string& m : tot::split(modes_str, ',')) {
                auto mode = tot::mode_from_name(tot::trim(m));
                if (!mode) throw CLI::ValidationError("unknown mode '" + m + "'");
                modes.push_back(*mode);
            }
            auto result = tot::run_benchmark(suites, modes, bench_backend.config(bench_seed),
                                             bench_rounds, bench_seed, jobs);
            std::cout << result.table();
            if (!csv_out.empty() && write_file(csv_out, result.csv()) != 0) return 2;
            return 0;
        }

        if (train_cmd->parsed()) {
            tcfg.train_set = tot::load_suite(train_set_file);
            if (!tcfg.train_set.empty())
                tcfg.pool = tot::ExamplePool::generate(8, tcfg.train_set[0].clues.order(),
                                                        tcfg.seed, 1);
            tot::TrainResult result = tot::train(tcfg);
            std::cout << result.curve_csv();
            if (!curve_out.empty() && write_file(curve_out, result.curve_csv()) != 0) return 2;
            if (!checkpoint_out.empty() &&
                write_file(checkpoint_out,
                           tot::net::save_checkpoint(result.controller, result.prompter)) != 0)
                return 2;
            return 0;
        }

        if (gen_cmd->parsed()) {
            if (blanks == 0) blanks = order * order / 2;
            std::cout << "# order=" << order << " blanks=" << blanks << " count=" << count
                      << " seed=" << gen_seed << "\n";
            for (int i = 0; i < count; ++i) {
                auto [puzzle, solution] = tot::generate_puzzle(
                    order, blanks, tot::seed_for(gen_seed, "suite", static_cast<std::uint64_t>(i)));
                std::cout << tot::render_board(puzzle.clues) << "\n";
            }
            return 0;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
