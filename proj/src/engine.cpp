#include "tot/engine.hpp"

#include <atomic>
#include <cassert>
#include <fstream>
#include <sstream>
#include <thread>

#include "tot/util.hpp"

namespace tot {

std::string_view mode_name(SolveMode m) {
    switch (m) {
        case SolveMode::Zs: return "zs";
        case SolveMode::Os: return "os";
        case SolveMode::Fs: return "fs";
        case SolveMode::Tot: return "tot";
    }
    return "?";
}

std::optional<SolveMode> mode_from_name(std::string_view name) {
    if (name == "zs") return SolveMode::Zs;
    if (name == "os") return SolveMode::Os;
    if (name == "fs") return SolveMode::Fs;
    if (name == "tot") return SolveMode::Tot;
    return std::nullopt;
}

RunOutcome solve(const Puzzle& puzzle, Backend& backend, const SolverOptions& opts) {
    if (opts.max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    const PromptLibrary lib = opts.prompts ? *opts.prompts : PromptLibrary::defaults();
    const ControllerConfig& ctrl = opts.controller;

    auto tree = std::make_shared<SearchTree>(puzzle.clues);
    RunOutcome out;
    const int calls_before = backend.calls();
    Rng ctrl_rng(seed_for(opts.seed, "controller"));
    Rng prompt_rng(seed_for(opts.seed, "prompter"));

    std::string prompt = initial_prompt(puzzle, lib);

    for (int round = 1; round <= opts.max_rounds; ++round) {
        const Completion completion = backend.complete(prompt);
        const CheckResult result =
            check_response(completion.text, puzzle, tree->current_board(), opts.strict_extract);
        out.rounds_used = round;

        if (result.status == CheckStatus::ValidFinal) {
            NodeId node = tree->add_child(tree->current(), *result.board, true);
            out.transcript.record_exchange(prompt, completion.text, result.status, node);
            out.solved = true;
            out.solution = result.board;
            out.reward = +1;
            break;
        }

        // memory.store(result): proposals become child nodes; a valid child
        // becomes current, gray (invalid) children do not. Unparseable
        // responses carry no board and only reach the transcript.
        NodeId affected = tree->current();
        if (result.board)
            affected = tree->add_child(tree->current(), *result.board,
                                       result.status == CheckStatus::ValidIntermediate);
        out.transcript.record_exchange(prompt, completion.text, result.status, affected);

        // Controller.
        const int children = static_cast<int>(tree->node(tree->current()).children.size());
        const bool at_root = tree->current() == tree->root();
        std::string invalid_hint = status_is_valid(result.status) ? "" : result.reason;

        if (opts.controller_params) {
            PolicyDecision decision =
                policy_decide(tree->window(opts.controller_params->cfg.history_k),
                              status_is_valid(result.status), *opts.controller_params, ctrl_rng,
                              tree->current_depth());
            if (opts.trajectory) {
                DecisionRecord rec;
                rec.owner = DecisionRecord::Owner::Controller;
                rec.window = tree->window(opts.controller_params->cfg.history_k);
                rec.checker_valid = status_is_valid(result.status);
                rec.candidates = decision.candidates;
                rec.taken = decision.taken;
                rec.logprob = decision.logprob;
                opts.trajectory->decisions.push_back(std::move(rec));
            }
            if (decision.signal.is_backtrack()) tree->backtrack(decision.signal.levels);
        } else {
            ControlSignal signal = rule_decide(result.status, children, ctrl, at_root);
            if (signal.is_backtrack() && !at_root) {
                // An invalid proposal never moved current, so backtrack(1)
                // onto its parent is the abandonment itself; the tree only
                // moves when the current node's child budget is spent.
                const bool move =
                    status_is_valid(result.status) || children >= ctrl.child_budget;
                if (move) tree->backtrack(signal.levels);
            }
        }

        // Prompter.
        std::vector<std::string> examples;
        if (opts.prompter_params && opts.example_pool) {
            ExampleSelection sel =
                policy_select_examples(tree->window(opts.prompter_params->cfg.history_k),
                                       *opts.example_pool, *opts.prompter_params, prompt_rng);
            examples = std::move(sel.texts);
            if (opts.trajectory)
                for (DecisionRecord& rec : sel.decisions)
                    opts.trajectory->decisions.push_back(std::move(rec));
        } else if (opts.example_pool && opts.plain_examples > 0) {
            const int l = std::min<int>(opts.plain_examples,
                                        static_cast<int>(opts.example_pool->candidates.size()));
            examples.assign(opts.example_pool->candidates.begin(),
                            opts.example_pool->candidates.begin() + l);
        }
        prompt = next_prompt(*tree, puzzle, examples, invalid_hint, lib);
    }

    assert(tree->size() <= static_cast<std::size_t>(out.rounds_used) + 1);
    assert(backend.calls() - calls_before == out.rounds_used);
    (void)calls_before;
    if (!out.solved) {
        out.rounds_used = opts.max_rounds;
        out.reward = -1;
    }
    out.tree = tree;
    return out;
}

RunOutcome single_shot_solve(const Puzzle& puzzle, SolveMode mode, const BackendConfig& backend_cfg,
                             std::uint64_t seed, const PromptLibrary* prompts) {
    if (mode == SolveMode::Tot) throw std::invalid_argument("tot is not a single-shot mode");
    const PromptLibrary lib = prompts ? *prompts : PromptLibrary::defaults();
    const int shots = mode == SolveMode::Zs ? 0 : mode == SolveMode::Os ? 1 : 3;

    BackendConfig cfg = backend_cfg;
    cfg.seed = seed;
    cfg.full_answer = true;
    auto backend = make_backend(cfg);

    const std::string prompt = baseline_prompt(puzzle, shots, lib);
    const Completion completion = backend->complete(prompt);
    const CheckResult result = check_response(completion.text, puzzle, puzzle.clues);

    RunOutcome out;
    out.rounds_used = 1;
    auto tree = std::make_shared<SearchTree>(puzzle.clues);
    NodeId affected = tree->root();
    if (result.board)
        affected = tree->add_child(tree->root(), *result.board,
                                   status_is_valid(result.status));
    out.transcript.record_exchange(prompt, completion.text, result.status, affected);
    if (result.status == CheckStatus::ValidFinal) {
        out.solved = true;
        out.solution = result.board;
        out.reward = +1;
    }
    out.tree = tree;
    return out;
}

std::vector<Puzzle> parse_suite(std::string_view text, const std::string& name) {
    std::vector<Puzzle> puzzles;
    int line_no = 0;
    for (const std::string& raw : split(text, '\n')) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        try {
            Board clues = parse_board(line);
            puzzles.push_back(Puzzle::make(clues, describe_puzzle(clues)));
        } catch (const std::runtime_error& e) {
            throw SuiteParseError(name + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return puzzles;
}

std::vector<Puzzle> load_suite(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SuiteParseError("cannot open suite file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_suite(ss.str(), path);
}

std::string BenchmarkResult::csv() const {
    std::string out = "suite,mode,puzzles,solved,success_rate,mean_rounds\n";
    for (const BenchmarkRow& r : rows)
        out += r.suite + "," + r.mode + "," + std::to_string(r.puzzles) + "," +
               std::to_string(r.solved) + "," + fmt_double(r.success_rate) + "," +
               fmt_double(r.mean_rounds) + "\n";
    return out;
}

std::string BenchmarkResult::table() const {
    const char* header[6] = {"suite", "mode", "puzzles", "solved", "success_rate", "mean_rounds"};
    std::vector<std::vector<std::string>> cells;
    cells.emplace_back(header, header + 6);
    for (const BenchmarkRow& r : rows)
        cells.push_back({r.suite, r.mode, std::to_string(r.puzzles), std::to_string(r.solved),
                         fmt_double(r.success_rate), fmt_double(r.mean_rounds)});

    std::size_t width[6] = {0, 0, 0, 0, 0, 0};
    for (const auto& row : cells)
        for (int i = 0; i < 6; ++i) width[i] = std::max(width[i], row[i].size());

    std::string out;
    for (const auto& row : cells) {
        for (int i = 0; i < 6; ++i) {
            std::string cell = row[i];
            cell.resize(width[i], ' ');
            out += cell;
            if (i < 5) out += "  ";
        }
        out += '\n';
    }
    return out;
}

BenchmarkResult run_benchmark(const std::vector<NamedSuite>& suites,
                              const std::vector<SolveMode>& modes, const BackendConfig& backend_cfg,
                              int max_rounds, std::uint64_t master_seed, int jobs,
                              const SolverOptions* tot_opts) {
    struct Cell {
        std::size_t suite;
        std::size_t puzzle;
        std::size_t mode;
        bool solved = false;
        int rounds = 0;
    };
    std::vector<Cell> cells;
    for (std::size_t s = 0; s < suites.size(); ++s)
        for (std::size_t m = 0; m < modes.size(); ++m)
            for (std::size_t p = 0; p < suites[s].puzzles.size(); ++p)
                cells.push_back(Cell{s, p, m});

    auto run_cell = [&](Cell& cell) {
        const Puzzle& puzzle = suites[cell.suite].puzzles[cell.puzzle];
        const SolveMode mode = modes[cell.mode];
        const std::uint64_t seed = seed_for(master_seed, mode_name(mode), cell.puzzle);
        RunOutcome outcome;
        if (mode == SolveMode::Tot) {
            BackendConfig cfg = backend_cfg;
            cfg.seed = seed;
            auto backend = make_backend(cfg);
            SolverOptions opts = tot_opts ? *tot_opts : SolverOptions{};
            opts.max_rounds = max_rounds;
            opts.seed = seed;
            outcome = solve(puzzle, *backend, opts);
        } else {
            outcome = single_shot_solve(puzzle, mode, backend_cfg, seed);
        }
        cell.solved = outcome.solved;
        cell.rounds = outcome.rounds_used;
    };

    if (jobs <= 1) {
        for (Cell& c : cells) run_cell(c);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int n = std::min<int>(jobs, static_cast<int>(cells.size()));
        pool.reserve(static_cast<std::size_t>(n));
        for (int t = 0; t < n; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                    run_cell(cells[i]);
            });
        for (std::thread& t : pool) t.join();
    }

    BenchmarkResult result;
    for (std::size_t s = 0; s < suites.size(); ++s)
        for (std::size_t m = 0; m < modes.size(); ++m) {
            BenchmarkRow row;
            row.suite = suites[s].name;
            row.mode = std::string(mode_name(modes[m]));
            long round_sum = 0;
            for (const Cell& c : cells) {
                if (c.suite != s || c.mode != m) continue;
                ++row.puzzles;
                if (c.solved) {
                    ++row.solved;
                    round_sum += c.rounds;
                }
            }
            row.success_rate = row.puzzles ? static_cast<double>(row.solved) / row.puzzles : 0.0;
            row.mean_rounds = row.solved ? static_cast<double>(round_sum) / row.solved : 0.0;
            result.rows.push_back(std::move(row));
        }
    return result;
}

}  // namespace tot
