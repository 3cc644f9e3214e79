#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "tot/board.hpp"
#include "tot/rng.hpp"

namespace tot {

struct AuthMissing : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BackendUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RateLimited : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct MalformedServerReply : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BackendConfig {
    enum class Kind { Sim, Http };
    Kind kind = Kind::Sim;

    // Sim: oracle-derived steps, corrupted with probability error_rate.
    double error_rate = 0.0;    // epsilon in [0, 1]
    int fill_max = 1;           // most cells one step may fill
    std::uint64_t seed = 0;
    bool full_answer = false;   // emit a whole board per call (zs/os/fs baselines)

    // Http: OpenAI-style chat completions.
    std::string endpoint = "https://api.openai.com/v1";
    std::string model = "gpt-3.5-turbo";
    double temperature = 1.0;
    int timeout_sec = 30;
    int retries = 3;
    int backoff_base_ms = 500;
    std::string api_key_env = "TOT_API_KEY";
};

struct Completion {
    std::string text;
    double latency_ms = 0.0;
    int prompt_tokens = -1;      // -1 when the backend reports no usage
    int completion_tokens = -1;
};

/// One LLM endpoint owned by one solver run. Implementations must be
/// deterministic for a fixed seed (sim) and must not be shared across
/// concurrent runs.
class Backend {
public:
    virtual ~Backend() = default;
    virtual Completion complete(const std::string& prompt) = 0;
    int calls() const { return calls_; }

protected:
    int calls_ = 0;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& cfg);

// One-off completion with a fresh backend (sim call-index starts at 0).
Completion complete(const std::string& prompt, const BackendConfig& cfg);

// The simulated proposer. With probability 1-error_rate emits an oracle-
// derived step extending `current` by 1..fill_max cells as strict JSON
// {"next_step": "<grid>"}. Otherwise emits one of: a duplicate-digit step, a
// clue overwrite, a no-new-cell step, or malformed text - mirroring the
// checker's Invalid/Unparseable classes. At a dead end (current has no
// completion) it emits a rule-violating guess so the engine must backtrack.
std::string sim_propose(const Board& current, const Puzzle& puzzle, double error_rate, int fill_max,
                        Rng& rng);

// Baseline mode: a full board whose originally-empty cells are independently
// corrupted with probability per_cell_error.
std::string sim_full_answer(const Puzzle& puzzle, double per_cell_error, Rng& rng);

// Blocking chat-completions request with exponential backoff on 429/5xx and
// transport errors. Reads the key from cfg.api_key_env before any network
// activity (AuthMissing when unset).
Completion http_complete(const std::string& prompt, const BackendConfig& cfg);

}  // namespace tot
