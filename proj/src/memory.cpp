#include "tot/memory.hpp"

#include <algorithm>
#include <charconv>

#include "tot/util.hpp"

namespace tot {

SearchTree::SearchTree(Board root_board) {
    nodes_.push_back(SearchNode{0, std::nullopt, std::move(root_board), true, 0, {}});
    visits_.push_back(0);
}

const SearchNode& SearchTree::node(NodeId id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
        throw UnknownNode("no node with id " + std::to_string(id));
    return nodes_[static_cast<std::size_t>(id)];
}

NodeId SearchTree::add_child(NodeId parent_id, Board board, bool valid) {
    node(parent_id);  // bounds check
    const NodeId id = static_cast<NodeId>(nodes_.size());
    SearchNode& parent = nodes_[static_cast<std::size_t>(parent_id)];
    nodes_.push_back(SearchNode{id, parent_id, std::move(board), valid, parent.depth + 1, {}});
    nodes_[static_cast<std::size_t>(parent_id)].children.push_back(id);
    if (valid) {
        current_ = id;
        visits_.push_back(id);
    }
    return id;
}

NodeId SearchTree::backtrack(int levels) {
    if (levels < 1) throw std::invalid_argument("backtrack levels must be >= 1");
    if (current_ == root()) throw AtRoot("already at the root node");
    NodeId id = current_;
    for (int i = 0; i < levels && nodes_[static_cast<std::size_t>(id)].parent; ++i)
        id = *nodes_[static_cast<std::size_t>(id)].parent;
    current_ = id;
    visits_.push_back(id);
    return id;
}

std::vector<Board> SearchTree::window(int k) const {
    if (k < 0) throw std::invalid_argument("window size must be >= 0");
    const std::size_t want = static_cast<std::size_t>(k) + 1;
    const std::size_t take = std::min(want, visits_.size());
    std::vector<Board> out;
    out.reserve(take);
    for (std::size_t i = visits_.size() - take; i < visits_.size(); ++i)
        out.push_back(nodes_[static_cast<std::size_t>(visits_[i])].board);
    return out;
}

int Transcript::record_exchange(std::string prompt, std::string response, CheckStatus status,
                                NodeId node) {
    const int round = static_cast<int>(exchanges_.size()) + 1;
    exchanges_.push_back(Exchange{round, std::move(prompt), std::move(response), status, node});
    return round;
}

std::string Transcript::serialize() const {
    std::string out;
    for (const Exchange& e : exchanges_) {
        out += "ROUND " + std::to_string(e.round);
        out += " | PROMPT " + base64_encode(e.prompt);
        out += " | RESPONSE " + base64_encode(e.response);
        out += " | STATUS " + std::string(status_word(e.status));
        out += " | NODE " + std::to_string(e.node);
        out += '\n';
    }
    return out;
}

namespace {

std::string_view expect_field(std::string_view& rest, std::string_view key) {
    if (!rest.starts_with(key)) throw std::invalid_argument("session log: expected " + std::string(key));
    rest.remove_prefix(key.size());
    auto end = rest.find(" | ");
    std::string_view value = end == std::string_view::npos ? rest : rest.substr(0, end);
    rest.remove_prefix(end == std::string_view::npos ? rest.size() : end + 3);
    return value;
}

int to_int(std::string_view s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("session log: bad integer '" + std::string(s) + "'");
    return v;
}

}  // namespace

Transcript Transcript::parse(const std::string& log) {
    Transcript t;
    for (const std::string& line : split(log, '\n')) {
        if (line.empty()) continue;
        std::string_view rest = line;
        int round = to_int(expect_field(rest, "ROUND "));
        std::string prompt = base64_decode(expect_field(rest, "PROMPT "));
        std::string response = base64_decode(expect_field(rest, "RESPONSE "));
        auto status = status_from_word(expect_field(rest, "STATUS "));
        if (!status) throw std::invalid_argument("session log: bad status word");
        int node = to_int(expect_field(rest, "NODE "));
        int got = t.record_exchange(std::move(prompt), std::move(response), *status, node);
        if (got != round) throw std::invalid_argument("session log: non-contiguous round index");
    }
    return t;
}

}  // namespace tot
