#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tot/board.hpp"
#include "tot/rng.hpp"
#include "tot/signal.hpp"
#include "tot/tensor.hpp"

namespace tot::net {

struct InfeasibleAction : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptySequence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct CheckpointError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NetConfig {
    int d = 16;             // feature dimension of both score branches
    int max_backtrack = 3;  // L: action one-hot has length L+1
    int history_k = 3;      // k: window length is k+1
    int max_digit = 9;      // largest board digit the vocabulary covers
    double init_scale = 0.1;

    int vocab_size() const { return max_digit + 5; }
    bool operator==(const NetConfig&) const = default;
};

// Token ids: 0 = empty cell, 1..max_digit = digits, then row separator,
// board separator (the || concatenation marker), valid, invalid.
struct TokenSeq {
    std::vector<int> ids;

    static TokenSeq from_board(const Board& b, const NetConfig& cfg);
    static TokenSeq from_window(const std::vector<Board>& boards, const NetConfig& cfg);
    // Free text: digit characters, '*' and row-ish separators are kept, the
    // rest is dropped. Never empty (falls back to a single empty-cell token).
    static TokenSeq from_text(std::string_view text, const NetConfig& cfg);
};

/// Named tensors plus parallel gradient buffers, in insertion order.
class ParamSet {
public:
    Matrix& add(const std::string& name, int rows, int cols);
    Matrix& get(const std::string& name);
    const Matrix& get(const std::string& name) const;
    Matrix* grad(const std::string& name);
    bool has(const std::string& name) const;

    void zero_grads();
    void apply_gradient(double step);  // value += step * grad, every tensor
    void init_gaussian(Rng& rng, double scale);

    std::size_t tensor_count() const { return names_.size(); }
    const std::string& name_at(std::size_t i) const { return names_[i]; }
    const Matrix& value_at(std::size_t i) const { return values_[i]; }
    const Matrix& grad_at(std::size_t i) const { return grads_[i]; }

    bool operator==(const ParamSet&) const = default;

private:
    std::size_t index_of(const std::string& name) const;
    std::vector<std::string> names_;
    std::vector<Matrix> values_;
    std::vector<Matrix> grads_;
};

/// Controller policy parameters (rho): action-side FFN + linear map, state
/// side token embedding + self-attention + linear map.
struct ControllerParams {
    NetConfig cfg;
    ParamSet p;
    static ControllerParams init(const NetConfig& cfg, std::uint64_t seed);
};

/// Prompter policy parameters (theta): example-side attention + linear map,
/// state side as in the controller. Owns its own embedding table so that
/// training one policy provably leaves the other untouched.
struct PrompterParams {
    NetConfig cfg;
    ParamSet p;
    static PrompterParams init(const NetConfig& cfg, std::uint64_t seed);
};

// One-hot action encoding: index 0 = stay, index j = backtrack j levels.
// Throws InfeasibleAction when the action does not fit L.
std::vector<double> encode_action(const ControlSignal& a, int max_backtrack);

// Sinusoidal position embedding, d x len.
Matrix positional_encoding(int d, int len);

// Softmax over raw scores, max-subtracted for stability.
std::vector<double> policy_distribution(const std::vector<double>& scores);

// Embed -> optional PE -> one single-head scaled-dot-product self-attention
// layer -> mean pool over tokens. `attn_prefix` selects wq/wk/wv tensors,
// e.g. "attn" reads attn.wq. Forward only; throws EmptySequence.
Matrix attention_pool(const ParamSet& params, const std::string& attn_prefix, const TokenSeq& seq,
                      bool use_pe, int d);

/// One forward evaluation of a policy over its candidate set. Keeps the
/// graph so the caller can run reverse-mode on a chosen candidate.
struct PolicyEval {
    Graph graph;
    std::vector<Graph::Id> logprob_ids;  // node of log pi(candidate i)
    std::vector<double> probs;
    std::vector<double> logprobs;
};

// Scores every candidate action against the encoded visit window. With
// with_grad, backward passes accumulate into params' gradient buffers.
PolicyEval controller_forward(ControllerParams& params, const std::vector<ControlSignal>& candidates,
                              bool checker_valid, const std::vector<Board>& window, bool with_grad);

// Scores candidate in-context examples against the encoded visit window.
PolicyEval prompter_forward(PrompterParams& params, const std::vector<TokenSeq>& examples,
                            const std::vector<Board>& window, bool with_grad);

// d log pi(taken) / d params, accumulated into the bound gradient buffers.
void accumulate_grad_log_prob(PolicyEval& eval, int taken);

// Versioned plain-text tensor dump of both parameter sets; loading then
// saving reproduces the file byte for byte.
std::string save_checkpoint(const ControllerParams& controller, const PrompterParams& prompter);
void load_checkpoint(std::string_view text, ControllerParams& controller, PrompterParams& prompter);

}  // namespace tot::net
