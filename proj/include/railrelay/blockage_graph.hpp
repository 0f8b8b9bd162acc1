#pragma once

#include <set>
#include <sstream>
#include <string>
#include <utility>

#include "railrelay/errors.hpp"
#include "railrelay/mode.hpp"

namespace railrelay {

/// Node id 0 is the BS; MRs are 1..F.
inline constexpr int kBaseStation = 0;

/// Directed edges marking blocked direct links (BS -> b) and neighbours that
/// a blocked MR cannot relay for (b -> b-1, b -> b+1).
class BlockageGraph {
public:
    using Edge = std::pair<int, int>;

    BlockageGraph() = default;

    BlockageGraph(const std::set<int>& blocked, int mr_count) : mr_count_(mr_count)
    {
        if (mr_count < 1) {
            throw InvalidConfig("blockage graph needs at least one MR");
        }
        for (int b : blocked) {
            if (b < 1 || b > mr_count) {
                throw InvalidConfig("blocked MR index " + std::to_string(b) + " out of range");
            }
            edges_.insert({kBaseStation, b});
            if (b > 1) {
                edges_.insert({b, b - 1});
            }
            if (b < mr_count) {
                edges_.insert({b, b + 1});
            }
        }
    }

    int mr_count() const { return mr_count_; }
    const std::set<Edge>& edges() const { return edges_; }
    bool has_edge(int from, int to) const { return edges_.contains({from, to}); }

    /// Modes of MR f ruled out by blockage or by its position at either end of the train.
    /// The UAV mode is never excluded here.
    ModeSet forbidden_modes(int f) const
    {
        ModeSet out;
        if (has_edge(kBaseStation, f)) {
            out.insert(Mode::Direct);
        }
        if (f == 1 || has_edge(f - 1, f)) {
            out.insert(Mode::Left);
        }
        if (f == mr_count_ || has_edge(f + 1, f)) {
            out.insert(Mode::Right);
        }
        return out;
    }

    /// One "u->v" line per edge; the BS is written as "BS".
    std::string dump() const
    {
        std::ostringstream os;
        for (const auto& [u, v] : edges_) {
            os << node_name(u) << "->" << node_name(v) << '\n';
        }
        return os.str();
    }

    bool operator==(const BlockageGraph&) const = default;

private:
    static std::string node_name(int n) { return n == kBaseStation ? "BS" : std::to_string(n); }

    int mr_count_ = 0;
    std::set<Edge> edges_;
};

inline BlockageGraph build_graph(const std::set<int>& blocked, int mr_count)
{
    return BlockageGraph(blocked, mr_count);
}

/// Parses the "u->v" edge-list dump back into an edge set.
inline std::set<BlockageGraph::Edge> parse_edge_list(const std::string& text)
{
    std::set<BlockageGraph::Edge> edges;
    std::istringstream is(text);
    std::string line;
    auto parse_node = [](const std::string& tok) {
        if (tok == "BS") {
            return kBaseStation;
        }
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(tok, &used);
        } catch (const std::exception&) {
            throw InvalidConfig("bad node '" + tok + "'");
        }
        if (used != tok.size() || v < 1) {
            throw InvalidConfig("bad node '" + tok + "'");
        }
        return v;
    };
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        const auto arrow = line.find("->");
        if (arrow == std::string::npos) {
            throw InvalidConfig("edge line without '->': " + line);
        }
        edges.insert({parse_node(line.substr(0, arrow)), parse_node(line.substr(arrow + 2))});
    }
    return edges;
}

} // namespace railrelay
