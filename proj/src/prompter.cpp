#include "tot/prompter.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tot/controller.hpp"

namespace tot {

PromptLibrary PromptLibrary::defaults() {
    PromptLibrary lib;
    lib.user_input =
        "For the given problem: {problem_description}, please derive the first step, and return "
        "the step in the following JSON format {next_step: <next_step>}";
    lib.generic =
        "For the given problem: {problem_description}, we have come up with a partial solution: "
        "{partial_solution_summary}. Please derive the next step on top of this partial solution, "
        "and return the next step in the following JSON format {next_step: <next_step>}";
    lib.few_shot = lib.generic + " Here are a few examples: {examples}";
    lib.single_shot =
        "For the given problem: {problem_description}, please solve the problem in one shot, and "
        "return the complete solution in the following JSON format {next_step: <complete_solution>}";
    return lib;
}

namespace {

bool read_file_into(const std::filesystem::path& p, std::string& out) {
    std::ifstream f(p);
    if (!f) return false;
    std::ostringstream ss;
    ss << f.rdbuf();
    out = ss.str();
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
    return true;
}

void replace_all(std::string& s, std::string_view marker, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = s.find(marker, pos)) != std::string::npos) {
        s.replace(pos, marker.size(), value);
        pos += value.size();
    }
}

}  // namespace

PromptLibrary PromptLibrary::load_dir(const std::string& dir) {
    PromptLibrary lib = defaults();
    read_file_into(std::filesystem::path(dir) / "user_input.txt", lib.user_input);
    read_file_into(std::filesystem::path(dir) / "generic.txt", lib.generic);
    read_file_into(std::filesystem::path(dir) / "few_shot.txt", lib.few_shot);
    read_file_into(std::filesystem::path(dir) / "single_shot.txt", lib.single_shot);
    return lib;
}

std::string render_template(std::string_view tmpl, std::string_view problem_description,
                            std::string_view partial_solution_summary, std::string_view examples) {
    std::string out(tmpl);
    if (contains(out, "{problem_description}")) {
        if (problem_description.empty()) throw SlotEmpty("problem description is empty");
        replace_all(out, "{problem_description}", problem_description);
    }
    if (contains(out, "{partial_solution_summary}")) {
        if (partial_solution_summary.empty()) throw SlotEmpty("partial solution summary is empty");
        replace_all(out, "{partial_solution_summary}", partial_solution_summary);
    }
    replace_all(out, "{examples}", examples);
    for (std::string_view marker :
         {"{problem_description}", "{partial_solution_summary}", "{examples}"})
        if (contains(out, marker))
            throw std::invalid_argument("unfilled slot marker " + std::string(marker));
    return out;
}

std::string initial_prompt(const Puzzle& puzzle, const PromptLibrary& lib) {
    return render_template(lib.user_input, puzzle.description, "", "");
}

namespace {

std::string join_examples(const std::vector<std::string>& examples) {
    std::string out;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        if (i > 0) out += "\n";
        out += examples[i];
    }
    return out;
}

}  // namespace

std::string next_prompt(const SearchTree& tree, const Puzzle& puzzle,
                        const std::vector<std::string>& examples, std::string_view invalid_reason,
                        const PromptLibrary& lib) {
    const std::string summary = render_board(tree.current_board());
    std::string body =
        examples.empty()
            ? render_template(lib.generic, puzzle.description, summary, "")
            : render_template(lib.few_shot, puzzle.description, summary, join_examples(examples));
    if (invalid_reason.empty()) return body;
    return "Hint: the previous attempt was rejected (" + std::string(invalid_reason) +
           "). Please take this into account and consider again.\n" + body;
}

std::string baseline_prompt(const Puzzle& puzzle, int example_count, const PromptLibrary& lib) {
    std::string out = render_template(lib.single_shot, puzzle.description, "", "");
    if (example_count > 0)
        out += " Here are a few examples: " + join_examples(baseline_traces(example_count));
    return out;
}

std::string worked_trace(const Puzzle& puzzle, const Board& solution) {
    std::string out = "Example: " + puzzle.description + "\n";
    Board work = puzzle.clues;
    int step = 0;
    for (int r = 0; r < work.order(); ++r)
        for (int c = 0; c < work.order(); ++c) {
            if (work.filled(r, c)) continue;
            work.set(r, c, solution.at(r, c));
            ++step;
            out += "Step " + std::to_string(step) + ": fill row " + std::to_string(r + 1) +
                   " column " + std::to_string(c + 1) + " with " +
                   std::to_string(solution.at(r, c)) + ", giving " + render_board(work) + "\n";
        }
    out += "Final solution: " + render_board(work);
    return out;
}

std::vector<std::string> baseline_traces(int count) {
    if (count != 1 && count != 3) throw std::invalid_argument("baseline trace count must be 1 or 3");
    // Fixed seeds so the baseline prompts are stable across runs.
    std::vector<std::string> out;
    const int orders[] = {3, 4, 5};
    for (int i = 0; i < count; ++i) {
        const int n = orders[i];
        auto [puzzle, solution] = generate_puzzle(n, n * n / 2, 0xba5e11 + static_cast<std::uint64_t>(n));
        out.push_back(worked_trace(puzzle, solution));
    }
    return out;
}

ExamplePool ExamplePool::generate(int pool_size, int order, std::uint64_t seed, int select_count) {
    ExamplePool pool;
    pool.select_count = select_count;
    pool.candidates.reserve(static_cast<std::size_t>(pool_size));
    for (int i = 0; i < pool_size; ++i) {
        auto [puzzle, solution] =
            generate_puzzle(order, order * order / 2, seed_for(seed, "example-pool", static_cast<std::uint64_t>(i)));
        pool.candidates.push_back(worked_trace(puzzle, solution));
    }
    return pool;
}

ExampleSelection policy_select_examples(const std::vector<Board>& window, const ExamplePool& pool,
                                        const net::PrompterParams& params, Rng& rng) {
    const int l = pool.select_count;
    if (l > static_cast<int>(pool.candidates.size()))
        throw PoolTooSmall("pool has " + std::to_string(pool.candidates.size()) +
                           " candidates, need " + std::to_string(l));

    std::vector<net::TokenSeq> tokens;
    tokens.reserve(pool.candidates.size());
    for (const std::string& c : pool.candidates)
        tokens.push_back(net::TokenSeq::from_text(c, params.cfg));

    std::vector<int> remaining(pool.candidates.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = static_cast<int>(i);

    ExampleSelection sel;
    for (int draw = 0; draw < l; ++draw) {
        std::vector<net::TokenSeq> cands;
        cands.reserve(remaining.size());
        for (int idx : remaining) cands.push_back(tokens[static_cast<std::size_t>(idx)]);

        int pos;
        double logprob;
        if (cands.size() == 1) {
            pos = 0;
            logprob = 0.0;  // single candidate: probability 1
        } else {
            auto eval = net::prompter_forward(const_cast<net::PrompterParams&>(params), cands,
                                              window, /*with_grad=*/false);
            pos = sample_index(eval.probs, rng);
            logprob = eval.logprobs[static_cast<std::size_t>(pos)];
        }

        DecisionRecord rec;
        rec.owner = DecisionRecord::Owner::Prompter;
        rec.window = window;
        rec.example_candidates = std::move(cands);
        rec.taken = pos;
        rec.logprob = logprob;
        sel.decisions.push_back(std::move(rec));

        const int pool_idx = remaining[static_cast<std::size_t>(pos)];
        sel.indices.push_back(pool_idx);
        sel.texts.push_back(pool.candidates[static_cast<std::size_t>(pool_idx)]);
        sel.logprobs.push_back(logprob);
        remaining.erase(remaining.begin() + pos);
    }
    return sel;
}

}  // namespace tot
