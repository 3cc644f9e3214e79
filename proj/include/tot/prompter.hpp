#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tot/board.hpp"
#include "tot/memory.hpp"
#include "tot/policy_net.hpp"
#include "tot/rng.hpp"
#include "tot/trajectory.hpp"

namespace tot {

struct SlotEmpty : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct PoolTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Prompt templates with {slot} markers. Slots: {problem_description},
/// {partial_solution_summary}, {examples}.
struct PromptLibrary {
    std::string user_input;   // first-step request
    std::string generic;      // next-step request on top of a partial solution
    std::string few_shot;     // generic plus an in-context examples section
    std::string single_shot;  // whole-solution request (zs/os/fs baselines)

    static PromptLibrary defaults();

    // Overrides defaults with any of user_input.txt, generic.txt,
    // few_shot.txt, single_shot.txt found in dir.
    static PromptLibrary load_dir(const std::string& dir);
};

// Renders template text, replacing known {slot} markers; throws SlotEmpty if
// a required slot value is empty, std::invalid_argument if a known marker
// survives rendering.
std::string render_template(std::string_view tmpl, std::string_view problem_description,
                            std::string_view partial_solution_summary, std::string_view examples);

// The first prompt of a run (no partial solution yet).
std::string initial_prompt(const Puzzle& puzzle, const PromptLibrary& lib = PromptLibrary::defaults());

// The per-round prompt. The controller's signal has already been applied to
// the tree, so the partial-solution summary is the current node's snapshot.
// A non-empty invalid_reason prepends a hint line asking the model to
// reconsider. Non-empty examples render through the few-shot template.
std::string next_prompt(const SearchTree& tree, const Puzzle& puzzle,
                        const std::vector<std::string>& examples, std::string_view invalid_reason,
                        const PromptLibrary& lib = PromptLibrary::defaults());

// Baseline single-call prompt for mode zs (no examples), os (one worked 3x3
// trace) or fs (three traces, one per order 3/4/5).
std::string baseline_prompt(const Puzzle& puzzle, int example_count,
                            const PromptLibrary& lib = PromptLibrary::defaults());

// A chain-of-thought style worked trace: the puzzle line, one fill step per
// cell (row-major order of the oracle completion), then the final grid.
std::string worked_trace(const Puzzle& puzzle, const Board& solution);

// Fixed worked traces for the os/fs baselines; count is 1 (a 3x3 trace) or
// 3 (orders 3, 4, 5).
std::vector<std::string> baseline_traces(int count);

/// Candidate in-context examples for the policy prompter.
struct ExamplePool {
    std::vector<std::string> candidates;
    int select_count = 1;  // l: examples chosen per prompt

    // Worked traces from seeded generated puzzles of the given order.
    static ExamplePool generate(int pool_size, int order, std::uint64_t seed, int select_count);
};

struct ExampleSelection {
    std::vector<int> indices;           // pool indices in draw order
    std::vector<std::string> texts;
    std::vector<double> logprobs;       // log-probability of each draw
    std::vector<DecisionRecord> decisions;  // one per draw, for REINFORCE
};

// Samples pool.select_count distinct examples without replacement from the
// example-scoring softmax, renormalizing after each draw. Throws PoolTooSmall
// when the pool cannot supply that many.
ExampleSelection policy_select_examples(const std::vector<Board>& window, const ExamplePool& pool,
                                        const net::PrompterParams& params, Rng& rng);

}  // namespace tot
