#include "tot/policy_net.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "tot/util.hpp"

namespace tot::net {

namespace {

int tok_row_sep(const NetConfig& cfg) { return cfg.max_digit + 1; }
int tok_board_sep(const NetConfig& cfg) { return cfg.max_digit + 2; }

}  // namespace

TokenSeq TokenSeq::from_board(const Board& b, const NetConfig& cfg) {
    TokenSeq seq;
    seq.ids.reserve(static_cast<std::size_t>(b.order()) * (b.order() + 1));
    for (int r = 0; r < b.order(); ++r) {
        if (r > 0) seq.ids.push_back(tok_row_sep(cfg));
        for (int c = 0; c < b.order(); ++c) {
            const int v = b.at(r, c);
            if (v > cfg.max_digit)
                throw std::out_of_range("digit " + std::to_string(v) + " exceeds vocabulary limit " +
                                        std::to_string(cfg.max_digit));
            seq.ids.push_back(v);  // 0 = empty token, else digit token
        }
    }
    return seq;
}

TokenSeq TokenSeq::from_window(const std::vector<Board>& boards, const NetConfig& cfg) {
    TokenSeq seq;
    for (std::size_t i = 0; i < boards.size(); ++i) {
        if (i > 0) seq.ids.push_back(tok_board_sep(cfg));
        TokenSeq one = from_board(boards[i], cfg);
        seq.ids.insert(seq.ids.end(), one.ids.begin(), one.ids.end());
    }
    return seq;
}

TokenSeq TokenSeq::from_text(std::string_view text, const NetConfig& cfg) {
    TokenSeq seq;
    for (char ch : text) {
        if (ch >= '1' && ch <= '9') {
            int v = ch - '0';
            if (v <= cfg.max_digit) seq.ids.push_back(v);
        } else if (ch == '*') {
            seq.ids.push_back(0);
        } else if (ch == ']' || ch == '\n') {
            if (!seq.ids.empty() && seq.ids.back() != tok_row_sep(cfg))
                seq.ids.push_back(tok_row_sep(cfg));
        }
    }
    if (seq.ids.empty()) seq.ids.push_back(0);
    return seq;
}

Matrix& ParamSet::add(const std::string& name, int rows, int cols) {
    if (has(name)) throw std::invalid_argument("duplicate tensor name " + name);
    names_.push_back(name);
    values_.emplace_back(rows, cols);
    grads_.emplace_back(rows, cols);
    return values_.back();
}

std::size_t ParamSet::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return i;
    throw std::invalid_argument("no tensor named " + name);
}

Matrix& ParamSet::get(const std::string& name) { return values_[index_of(name)]; }
const Matrix& ParamSet::get(const std::string& name) const { return values_[index_of(name)]; }
Matrix* ParamSet::grad(const std::string& name) { return &grads_[index_of(name)]; }

bool ParamSet::has(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

void ParamSet::zero_grads() {
    for (Matrix& g : grads_) std::fill(g.a.begin(), g.a.end(), 0.0);
}

void ParamSet::apply_gradient(double step) {
    for (std::size_t i = 0; i < values_.size(); ++i)
        for (std::size_t j = 0; j < values_[i].size(); ++j)
            values_[i].a[j] += step * grads_[i].a[j];
}

void ParamSet::init_gaussian(Rng& rng, double scale) {
    for (Matrix& v : values_)
        for (double& x : v.a) x = scale * rng.gaussian();
}

namespace {

void add_attention(ParamSet& p, const std::string& prefix, int d) {
    p.add(prefix + ".wq", d, d);
    p.add(prefix + ".wk", d, d);
    p.add(prefix + ".wv", d, d);
}

}  // namespace

ControllerParams ControllerParams::init(const NetConfig& cfg, std::uint64_t seed) {
    ControllerParams cp;
    cp.cfg = cfg;
    const int d = cfg.d;
    cp.p.add("embed", d, cfg.vocab_size());
    cp.p.add("ffn.w1", 4 * d, cfg.max_backtrack + 2);  // one-hot(L+1) ++ checker bit
    cp.p.add("ffn.b1", 4 * d, 1);
    cp.p.add("ffn.w2", d, 4 * d);
    cp.p.add("ffn.b2", d, 1);
    cp.p.add("act.w", d, d);
    cp.p.add("act.b", d, 1);
    add_attention(cp.p, "attn", d);
    cp.p.add("state.w", d, d);
    cp.p.add("state.b", d, 1);
    Rng rng(seed_for(seed, "controller-params"));
    cp.p.init_gaussian(rng, cfg.init_scale);
    return cp;
}

PrompterParams PrompterParams::init(const NetConfig& cfg, std::uint64_t seed) {
    PrompterParams pp;
    pp.cfg = cfg;
    const int d = cfg.d;
    pp.p.add("embed", d, cfg.vocab_size());
    add_attention(pp.p, "ex_attn", d);
    pp.p.add("ex.w", d, d);
    pp.p.add("ex.b", d, 1);
    add_attention(pp.p, "st_attn", d);
    pp.p.add("state.w", d, d);
    pp.p.add("state.b", d, 1);
    Rng rng(seed_for(seed, "prompter-params"));
    pp.p.init_gaussian(rng, cfg.init_scale);
    return pp;
}

std::vector<double> encode_action(const ControlSignal& a, int max_backtrack) {
    std::vector<double> v(static_cast<std::size_t>(max_backtrack) + 1, 0.0);
    if (!a.is_backtrack()) {
        v[0] = 1.0;
    } else {
        if (a.levels < 1 || a.levels > max_backtrack)
            throw InfeasibleAction("backtrack(" + std::to_string(a.levels) + ") does not fit L=" +
                                   std::to_string(max_backtrack));
        v[static_cast<std::size_t>(a.levels)] = 1.0;
    }
    return v;
}

Matrix positional_encoding(int d, int len) {
    Matrix pe(d, len);
    for (int pos = 0; pos < len; ++pos)
        for (int r = 0; r < d; ++r) {
            const double exponent = static_cast<double>(r - (r % 2)) / d;
            const double angle = pos / std::pow(10000.0, exponent);
            pe.at(r, pos) = (r % 2 == 0) ? std::sin(angle) : std::cos(angle);
        }
    return pe;
}

std::vector<double> policy_distribution(const std::vector<double>& scores) {
    if (scores.empty()) throw std::invalid_argument("policy_distribution: no candidates");
    const double mx = *std::max_element(scores.begin(), scores.end());
    std::vector<double> out(scores.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - mx);
        sum += out[i];
    }
    for (double& p : out) p /= sum;
    return out;
}

namespace {

Matrix one_hot_tokens(const TokenSeq& seq, int vocab) {
    Matrix oh(vocab, static_cast<int>(seq.ids.size()));
    for (std::size_t t = 0; t < seq.ids.size(); ++t) {
        const int id = seq.ids[t];
        if (id < 0 || id >= vocab) throw std::out_of_range("token id outside vocabulary");
        oh.at(id, static_cast<int>(t)) = 1.0;
    }
    return oh;
}

struct Binder {
    Graph& g;
    ParamSet& p;
    bool with_grad;
    Graph::Id operator()(const std::string& name) {
        return g.param(p.get(name), with_grad ? p.grad(name) : nullptr);
    }
};

// embed -> (+PE) -> single-head SDPA -> mean pool; returns the pooled d x 1 id.
Graph::Id attention_pool_graph(Graph& g, Binder& bind, const std::string& prefix,
                               const TokenSeq& seq, bool use_pe, int d, int vocab) {
    if (seq.ids.empty()) throw EmptySequence("attention over an empty token sequence");
    Graph::Id x = g.matmul(bind("embed"), g.constant(one_hot_tokens(seq, vocab)));
    if (use_pe) x = g.add(x, g.constant(positional_encoding(d, static_cast<int>(seq.ids.size()))));
    Graph::Id q = g.matmul(bind(prefix + ".wq"), x);
    Graph::Id k = g.matmul(bind(prefix + ".wk"), x);
    Graph::Id v = g.matmul(bind(prefix + ".wv"), x);
    Graph::Id scores = g.scale(g.matmul(g.transpose(q), k), 1.0 / std::sqrt(static_cast<double>(d)));
    Graph::Id attn = g.softmax_rows(scores);
    Graph::Id out = g.matmul(v, g.transpose(attn));
    return g.mean_cols(out);
}

Graph::Id linear_map(Graph& g, Binder& bind, const std::string& w, const std::string& b,
                     Graph::Id x) {
    return g.add(g.matmul(bind(w), x), bind(b));
}

PolicyEval finish_eval(Graph&& g, Graph::Id scores_col) {
    PolicyEval eval{std::move(g), {}, {}, {}};
    Graph::Id logp = eval.graph.log_softmax_col(scores_col);
    const Matrix& lp = eval.graph.value(logp);
    eval.logprob_ids.reserve(static_cast<std::size_t>(lp.rows));
    for (int i = 0; i < lp.rows; ++i) {
        eval.logprob_ids.push_back(eval.graph.pick(logp, i, 0));
        eval.logprobs.push_back(lp.at(i, 0));
        eval.probs.push_back(std::exp(lp.at(i, 0)));
    }
    return eval;
}

}  // namespace

Matrix attention_pool(const ParamSet& params, const std::string& attn_prefix, const TokenSeq& seq,
                      bool use_pe, int d) {
    Graph g;
    Binder bind{g, const_cast<ParamSet&>(params), false};
    Graph::Id pooled = attention_pool_graph(g, bind, attn_prefix, seq, use_pe, d,
                                            params.get("embed").cols);
    return g.value(pooled);
}

PolicyEval controller_forward(ControllerParams& params, const std::vector<ControlSignal>& candidates,
                              bool checker_valid, const std::vector<Board>& window, bool with_grad) {
    if (candidates.empty()) throw std::invalid_argument("controller_forward: no candidate actions");
    if (window.empty()) throw EmptySequence("controller_forward: empty visit window");
    const NetConfig& cfg = params.cfg;
    Graph g;
    Binder bind{g, params.p, with_grad};

    // State branch: g(s_i, .., s_{i-k}) = W2 . AttnPool(PE(s_{i-k} || .. || s_i)) + b2
    TokenSeq win = TokenSeq::from_window(window, cfg);
    Graph::Id pooled = attention_pool_graph(g, bind, "attn", win, true, cfg.d, cfg.vocab_size());
    Graph::Id g_state = linear_map(g, bind, "state.w", "state.b", pooled);

    // Action branch per candidate: g(a, c_i) = W1 . FFN(one-hot(a) ++ c_i) + b1
    std::vector<Graph::Id> g_actions;
    g_actions.reserve(candidates.size());
    for (const ControlSignal& a : candidates) {
        std::vector<double> onehot = encode_action(a, cfg.max_backtrack);
        Matrix x(cfg.max_backtrack + 2, 1);
        for (std::size_t i = 0; i < onehot.size(); ++i) x.at(static_cast<int>(i), 0) = onehot[i];
        x.at(cfg.max_backtrack + 1, 0) = checker_valid ? 1.0 : 0.0;
        Graph::Id h = g.relu(linear_map(g, bind, "ffn.w1", "ffn.b1", g.constant(std::move(x))));
        Graph::Id f = linear_map(g, bind, "ffn.w2", "ffn.b2", h);
        g_actions.push_back(linear_map(g, bind, "act.w", "act.b", f));
    }

    Graph::Id scores = g.matmul(g.transpose(g.hcat(g_actions)), g_state);
    return finish_eval(std::move(g), scores);
}

PolicyEval prompter_forward(PrompterParams& params, const std::vector<TokenSeq>& examples,
                            const std::vector<Board>& window, bool with_grad) {
    if (examples.empty()) throw std::invalid_argument("prompter_forward: no candidate examples");
    if (window.empty()) throw EmptySequence("prompter_forward: empty visit window");
    const NetConfig& cfg = params.cfg;
    Graph g;
    Binder bind{g, params.p, with_grad};

    // State branch: h(s_i, .., s_{i-k}) = M2 . AttnPool(PE(...)) + c2
    TokenSeq win = TokenSeq::from_window(window, cfg);
    Graph::Id pooled = attention_pool_graph(g, bind, "st_attn", win, true, cfg.d, cfg.vocab_size());
    Graph::Id h_state = linear_map(g, bind, "state.w", "state.b", pooled);

    // Example branch per candidate: h(e) = M1 . AttnPool(e) + c1 (no PE)
    std::vector<Graph::Id> h_examples;
    h_examples.reserve(examples.size());
    for (const TokenSeq& e : examples) {
        Graph::Id ep = attention_pool_graph(g, bind, "ex_attn", e, false, cfg.d, cfg.vocab_size());
        h_examples.push_back(linear_map(g, bind, "ex.w", "ex.b", ep));
    }

    Graph::Id scores = g.matmul(g.transpose(g.hcat(h_examples)), h_state);
    return finish_eval(std::move(g), scores);
}

void accumulate_grad_log_prob(PolicyEval& eval, int taken) {
    if (taken < 0 || static_cast<std::size_t>(taken) >= eval.logprob_ids.size())
        throw std::out_of_range("taken candidate index");
    eval.graph.backward(eval.logprob_ids[static_cast<std::size_t>(taken)]);
}

// ---------------------------------------------------------------------------
// Checkpoint format:
//   TOTCKPT 1
//   meta <key> <int>          (d, L, k, max_digit for each section)
//   tensor <name> <rows> <cols>
//   <cols doubles per line, rows lines, shortest round-trip decimal>
// ---------------------------------------------------------------------------

namespace {

void save_meta(std::string& out, const std::string& prefix, const NetConfig& cfg) {
    out += "meta " + prefix + ".d " + std::to_string(cfg.d) + "\n";
    out += "meta " + prefix + ".L " + std::to_string(cfg.max_backtrack) + "\n";
    out += "meta " + prefix + ".k " + std::to_string(cfg.history_k) + "\n";
    out += "meta " + prefix + ".max_digit " + std::to_string(cfg.max_digit) + "\n";
}

void save_tensors(std::string& out, const std::string& prefix, const ParamSet& p) {
    for (std::size_t i = 0; i < p.tensor_count(); ++i) {
        const Matrix& m = p.value_at(i);
        out += "tensor " + prefix + "." + p.name_at(i) + " " + std::to_string(m.rows) + " " +
               std::to_string(m.cols) + "\n";
        for (int r = 0; r < m.rows; ++r) {
            for (int c = 0; c < m.cols; ++c) {
                if (c > 0) out += ' ';
                out += fmt_double(m.at(r, c));
            }
            out += '\n';
        }
    }
}

struct CkptReader {
    std::vector<std::string> lines;
    std::size_t pos = 0;

    explicit CkptReader(std::string_view text) : lines(split(text, '\n')) {}

    bool done() const { return pos >= lines.size() || (pos + 1 == lines.size() && lines[pos].empty()); }
    const std::string& peek() const { return lines[pos]; }
    std::string next() {
        if (pos >= lines.size()) throw CheckpointError("unexpected end of checkpoint");
        return lines[pos++];
    }
};

int meta_int(CkptReader& r, const std::string& key) {
    std::string line = r.next();
    const std::string want = "meta " + key + " ";
    if (!line.starts_with(want)) throw CheckpointError("expected '" + want + "', got '" + line + "'");
    return std::stoi(line.substr(want.size()));
}

NetConfig load_meta(CkptReader& r, const std::string& prefix) {
    NetConfig cfg;
    cfg.d = meta_int(r, prefix + ".d");
    cfg.max_backtrack = meta_int(r, prefix + ".L");
    cfg.history_k = meta_int(r, prefix + ".k");
    cfg.max_digit = meta_int(r, prefix + ".max_digit");
    return cfg;
}

double parse_strict_double(std::string_view s) {
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw CheckpointError("bad float '" + std::string(s) + "'");
    return v;
}

void load_tensors(CkptReader& r, const std::string& prefix, ParamSet& p) {
    for (std::size_t i = 0; i < p.tensor_count(); ++i) {
        std::string header = r.next();
        auto parts = split(header, ' ');
        if (parts.size() != 4 || parts[0] != "tensor")
            throw CheckpointError("expected tensor header, got '" + header + "'");
        const std::string want = prefix + "." + p.name_at(i);
        if (parts[1] != want) throw CheckpointError("expected tensor " + want + ", got " + parts[1]);
        Matrix& m = p.get(p.name_at(i));
        if (std::stoi(parts[2]) != m.rows || std::stoi(parts[3]) != m.cols)
            throw CheckpointError("tensor " + want + " shape mismatch");
        for (int row = 0; row < m.rows; ++row) {
            auto vals = split(r.next(), ' ');
            if (static_cast<int>(vals.size()) != m.cols)
                throw CheckpointError("tensor " + want + " row length mismatch");
            for (int c = 0; c < m.cols; ++c) m.at(row, c) = parse_strict_double(vals[c]);
        }
    }
}

}  // namespace

std::string save_checkpoint(const ControllerParams& controller, const PrompterParams& prompter) {
    std::string out = "TOTCKPT 1\n";
    save_meta(out, "controller", controller.cfg);
    save_tensors(out, "controller", controller.p);
    save_meta(out, "prompter", prompter.cfg);
    save_tensors(out, "prompter", prompter.p);
    return out;
}

void load_checkpoint(std::string_view text, ControllerParams& controller, PrompterParams& prompter) {
    CkptReader r(text);
    if (r.next() != "TOTCKPT 1") throw CheckpointError("not a TOTCKPT version 1 file");
    NetConfig c_cfg = load_meta(r, "controller");
    controller = ControllerParams::init(c_cfg, 0);
    load_tensors(r, "controller", controller.p);
    NetConfig p_cfg = load_meta(r, "prompter");
    prompter = PrompterParams::init(p_cfg, 0);
    load_tensors(r, "prompter", prompter.p);
    if (!r.done()) throw CheckpointError("trailing content after tensors");
}

}  // namespace tot::net
