#include "tot/backend.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tot/util.hpp"

namespace tot {

namespace {

std::string step_json(const Board& b) {
    return "{\"next_step\": \"" + render_board(b) + "\"}";
}

// First bracketed grid at or after `from`; nullopt when none parses.
std::optional<Board> find_grid(std::string_view text, std::size_t from) {
    std::size_t pos = text.find("[[", from);
    while (pos != std::string_view::npos) {
        try {
            std::size_t p = pos;
            return parse_board_prefix(text, p);
        } catch (const std::runtime_error&) {
            pos = text.find("[[", pos + 1);
        }
    }
    return std::nullopt;
}

// A step that the checker must reject: preferably a duplicate digit, else a
// clue overwrite, else the unchanged board (no new cell).
std::string invalid_guess(const Board& current, const Puzzle& puzzle) {
    const int n = current.order();
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            if (current.filled(r, c)) continue;
            for (int v = 1; v <= n; ++v) {
                bool conflicts = false;
                for (int k = 0; k < n && !conflicts; ++k)
                    conflicts = current.at(r, k) == v || current.at(k, c) == v;
                if (conflicts) {
                    Board b = current;
                    b.set(r, c, v);
                    return step_json(b);
                }
            }
        }
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (puzzle.clues.filled(r, c)) {
                Board b = current;
                b.set(r, c, puzzle.clues.at(r, c) % n + 1);
                return step_json(b);
            }
    return step_json(current);
}

}  // namespace

std::string sim_propose(const Board& current, const Puzzle& puzzle, double error_rate, int fill_max,
                        Rng& rng) {
    if (fill_max < 1) throw std::invalid_argument("fill_max must be >= 1");
    const bool corrupt = rng.unit() < error_rate;

    if (!corrupt) {
        auto solution = solve_oracle(current);
        if (!solution) return invalid_guess(current, puzzle);  // dead end: force a rejection

        std::vector<std::pair<int, int>> empties;
        for (int r = 0; r < current.order(); ++r)
            for (int c = 0; c < current.order(); ++c)
                if (!current.filled(r, c)) empties.emplace_back(r, c);

        const int cap = std::min<int>(fill_max, static_cast<int>(empties.size()));
        const int k = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(cap)));
        Board b = current;
        for (std::size_t idx : rng.sample_indices(empties.size(), static_cast<std::size_t>(k))) {
            auto [r, c] = empties[idx];
            b.set(r, c, solution->at(r, c));
        }
        return step_json(b);
    }

    int kind = static_cast<int>(rng.below(4));
    if (kind == 0) {  // duplicate digit
        const int n = current.order();
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                if (current.filled(r, c)) continue;
                for (int v = 1; v <= n; ++v) {
                    bool conflicts = false;
                    for (int k = 0; k < n && !conflicts; ++k)
                        conflicts = current.at(r, k) == v || current.at(k, c) == v;
                    if (conflicts) {
                        Board b = current;
                        b.set(r, c, v);
                        return step_json(b);
                    }
                }
            }
        kind = 1;  // nothing conflicts (nearly empty board)
    }
    if (kind == 1) {  // clue overwrite
        const int n = current.order();
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                if (puzzle.clues.filled(r, c)) {
                    Board b = current;
                    b.set(r, c, puzzle.clues.at(r, c) % n + 1);
                    return step_json(b);
                }
        kind = 2;  // clue-free puzzle
    }
    if (kind == 2) return step_json(current);  // no new cell
    return rng.below(2) == 0 ? "I cannot determine the next step for this puzzle."
                             : "{\"step\": \"[[1]]\"}";
}

std::string sim_full_answer(const Puzzle& puzzle, double per_cell_error, Rng& rng) {
    auto solution = solve_oracle(puzzle.clues);
    if (!solution) return "{\"next_step\": \"" + render_board(puzzle.clues) + "\"}";
    Board b = *solution;
    const int n = b.order();
    for (int r = 0; r < n && n >= 2; ++r)
        for (int c = 0; c < n; ++c) {
            if (puzzle.clues.filled(r, c)) continue;
            if (rng.unit() < per_cell_error) {
                const int correct = b.at(r, c);
                int wrong = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 1)));
                if (wrong >= correct) ++wrong;
                b.set(r, c, wrong);
            }
        }
    return step_json(b);
}

namespace {

class SimBackend final : public Backend {
public:
    explicit SimBackend(const BackendConfig& cfg)
        : cfg_(cfg), rng_(seed_for(cfg.seed, "sim-backend")) {}

    Completion complete(const std::string& prompt) override {
        ++calls_;
        // The default prompt templates carry the clue grid inside the problem
        // description and the current board after the partial-solution marker.
        auto clues = find_grid(prompt, 0);
        if (!clues) throw std::invalid_argument("sim backend: prompt carries no clue grid");

        Board current = *clues;
        if (auto marker = prompt.find("a partial solution: "); marker != std::string::npos)
            if (auto cur = find_grid(prompt, marker)) current = *cur;

        Puzzle puzzle{*clues, "sim"};

        std::string text;
        if (cfg_.full_answer) {
            // Worked examples in the prompt lower the per-cell error rate.
            const auto shots = count_occurrences(prompt, "Example: ");
            text = sim_full_answer(puzzle, cfg_.error_rate / (1.0 + static_cast<double>(shots)), rng_);
        } else {
            text = sim_propose(current, puzzle, cfg_.error_rate, cfg_.fill_max, rng_);
        }
        return Completion{std::move(text), 0.0, -1, -1};
    }

private:
    BackendConfig cfg_;
    Rng rng_;
};

class HttpBackend final : public Backend {
public:
    explicit HttpBackend(const BackendConfig& cfg) : cfg_(cfg) {}
    Completion complete(const std::string& prompt) override {
        ++calls_;
        return http_complete(prompt, cfg_);
    }

private:
    BackendConfig cfg_;
};

// endpoint -> (scheme://host[:port], path prefix)
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos)
        throw BackendUnavailable("endpoint must start with http:// or https://");
    auto path_start = endpoint.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, ""};
    std::string prefix = endpoint.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {endpoint.substr(0, path_start), prefix};
}

}  // namespace

Completion http_complete(const std::string& prompt, const BackendConfig& cfg) {
    const char* key = std::getenv(cfg.api_key_env.c_str());
    if (!key || !*key)
        throw AuthMissing("API key environment variable " + cfg.api_key_env + " is not set");

    nlohmann::json body;
    body["model"] = cfg.model;
    if (cfg.temperature == std::floor(cfg.temperature))
        body["temperature"] = static_cast<int>(cfg.temperature);
    else
        body["temperature"] = cfg.temperature;
    body["messages"] = nlohmann::json::array({{{"role", "user"}, {"content", prompt}}});
    const std::string payload = body.dump();

    auto [base, prefix] = split_endpoint(cfg.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(cfg.timeout_sec, 0);
    client.set_read_timeout(cfg.timeout_sec, 0);
    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};

    int last_status = 0;
    std::string last_error = "no attempt made";
    const auto t0 = std::chrono::steady_clock::now();

    for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
        if (attempt > 0)
            std::this_thread::sleep_for(
                std::chrono::milliseconds(cfg.backoff_base_ms << (attempt - 1)));

        auto res = client.Post(prefix + "/chat/completions", headers, payload, "application/json");
        if (!res) {
            last_status = 0;
            last_error = httplib::to_string(res.error());
            continue;  // transport error: retry
        }
        last_status = res->status;
        if (res->status == 429 || res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;  // transient: retry
        }
        if (res->status != 200)
            throw BackendUnavailable("HTTP " + std::to_string(res->status) + ": " + res->body);

        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty() ||
            !reply["choices"][0].contains("message") ||
            !reply["choices"][0]["message"].contains("content"))
            throw MalformedServerReply("unexpected chat-completions reply: " + res->body);

        Completion out;
        out.text = reply["choices"][0]["message"]["content"].get<std::string>();
        out.latency_ms = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - t0)
                             .count();
        if (reply.contains("usage")) {
            out.prompt_tokens = reply["usage"].value("prompt_tokens", -1);
            out.completion_tokens = reply["usage"].value("completion_tokens", -1);
        }
        return out;
    }

    if (last_status == 429)
        throw RateLimited("rate limited after " + std::to_string(cfg.retries + 1) + " attempts");
    throw BackendUnavailable("request failed after " + std::to_string(cfg.retries + 1) +
                             " attempts: " + last_error);
}

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg) {
    if (cfg.kind == BackendConfig::Kind::Sim) return std::make_unique<SimBackend>(cfg);
    return std::make_unique<HttpBackend>(cfg);
}

Completion complete(const std::string& prompt, const BackendConfig& cfg) {
    return make_backend(cfg)->complete(prompt);
}

}  // namespace tot
