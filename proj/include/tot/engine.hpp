#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tot/backend.hpp"
#include "tot/board.hpp"
#include "tot/checker.hpp"
#include "tot/controller.hpp"
#include "tot/memory.hpp"
#include "tot/prompter.hpp"
#include "tot/signal.hpp"
#include "tot/trajectory.hpp"

namespace tot {

struct SuiteParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SolveMode { Zs, Os, Fs, Tot };

std::string_view mode_name(SolveMode m);
std::optional<SolveMode> mode_from_name(std::string_view name);

struct SolverOptions {
    int max_rounds = 100;  // K
    ControllerConfig controller;
    std::uint64_t seed = 0;
    bool strict_extract = false;

    // Policy components; null pointers select the rule controller / plain prompter.
    net::ControllerParams* controller_params = nullptr;
    net::PrompterParams* prompter_params = nullptr;
    const ExamplePool* example_pool = nullptr;  // required for the policy prompter
    int plain_examples = 0;  // the plain prompter appends the first l pool examples

    const PromptLibrary* prompts = nullptr;  // defaults when null
    Trajectory* trajectory = nullptr;        // sink for policy decisions
};

struct RunOutcome {
    bool solved = false;
    std::optional<Board> solution;
    int rounds_used = 0;
    int reward = -1;  // +1 iff solved
    Transcript transcript;
    std::shared_ptr<const SearchTree> tree;  // final memory state, for inspection
};

// Algorithm-2 solve loop: initial prompt, then up to K rounds of
// LLM -> checker -> memory -> controller -> next prompt. Exactly one backend
// call per round; returns early on a valid final solution.
RunOutcome solve(const Puzzle& puzzle, Backend& backend, const SolverOptions& opts);

// Single-call baselines. Renders the zs/os/fs prompt (0, 1 or 3 worked
// traces), makes one backend call, and accepts only a valid final board.
RunOutcome single_shot_solve(const Puzzle& puzzle, SolveMode mode, const BackendConfig& backend_cfg,
                             std::uint64_t seed, const PromptLibrary* prompts = nullptr);

// Suite files: one puzzle grid per line; lines starting with '#' are
// comments; blank lines are skipped.
std::vector<Puzzle> parse_suite(std::string_view text, const std::string& name);
std::vector<Puzzle> load_suite(const std::string& path);

struct BenchmarkRow {
    std::string suite;
    std::string mode;
    int puzzles = 0;
    int solved = 0;
    double success_rate = 0.0;
    double mean_rounds = 0.0;  // among solved runs; 0 when none solved
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    std::string csv() const;    // suite,mode,puzzles,solved,success_rate,mean_rounds
    std::string table() const;  // aligned text table
};

struct NamedSuite {
    std::string name;
    std::vector<Puzzle> puzzles;
};

// Runs every (suite, puzzle, mode) cell; per-run seed is
// seed_for(master_seed, mode, puzzle_index). Cells run on `jobs` worker
// threads; output order is canonical regardless of scheduling. The tot mode
// runs the full solve loop, other modes the single-shot baseline.
BenchmarkResult run_benchmark(const std::vector<NamedSuite>& suites,
                              const std::vector<SolveMode>& modes, const BackendConfig& backend_cfg,
                              int max_rounds, std::uint64_t master_seed, int jobs = 1,
                              const SolverOptions* tot_opts = nullptr);

}  // namespace tot
