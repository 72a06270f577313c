#include "qf/chains.hpp"

#include <ostream>
#include <stdexcept>
#include <unordered_set>

namespace qf {

std::vector<Chain> enumerate_chains(const QuoteTree& tree) {
    std::vector<std::vector<std::int32_t>> children(tree.size());
    std::vector<bool> is_leaf(tree.size(), true);
    for (std::size_t i = 1; i < tree.size(); ++i) {
        children[tree.nodes[i].parent].push_back(static_cast<std::int32_t>(i));
        is_leaf[tree.nodes[i].parent] = false;
    }
    std::vector<Chain> chains;
    std::vector<std::int32_t> path;
    // Iterative DFS; nodes are in BFS order so parents precede children.
    struct Frame { std::int32_t node; std::size_t next_child; };
    std::vector<Frame> frames{{0, 0}};
    path.push_back(0);
    while (!frames.empty()) {
        Frame& f = frames.back();
        if (is_leaf[f.node]) {
            Chain c;
            c.users.reserve(path.size());
            for (std::int32_t ni : path) c.users.push_back(tree.nodes[ni].user_id);
            chains.push_back(std::move(c));
            frames.pop_back();
            path.pop_back();
            continue;
        }
        if (f.next_child < children[f.node].size()) {
            std::int32_t child = children[f.node][f.next_child++];
            frames.push_back({child, 0});
            path.push_back(child);
        } else {
            frames.pop_back();
            path.pop_back();
        }
    }
    return chains;
}

const char* to_string(CensusMode m) {
    return m == CensusMode::paths ? "paths" : "nodes";
}

std::map<int, std::size_t> chain_census(const Forest& forest, CensusMode mode) {
    // Count exact depths first, then accumulate from the deep end.
    std::map<int, std::size_t> at_depth;
    int max_depth = 0;
    for (const auto& tree : forest.trees) {
        if (mode == CensusMode::paths) {
            for (const auto& chain : enumerate_chains(tree)) {
                ++at_depth[chain.depth()];
                max_depth = std::max(max_depth, chain.depth());
            }
        } else {
            for (const auto& n : tree.nodes) {
                if (n.depth == 0) continue;
                ++at_depth[n.depth];
                max_depth = std::max(max_depth, static_cast<int>(n.depth));
            }
        }
    }
    std::map<int, std::size_t> census;
    std::size_t acc = 0;
    for (int d = max_depth; d >= 1; --d) {
        auto it = at_depth.find(d);
        if (it != at_depth.end()) acc += it->second;
        census[d] = acc;
    }
    return census;
}

int unique_terminal_quoters(const Chain& chain, int w) {
    if (w < 2) throw std::invalid_argument("unique_terminal_quoters: window must be >= 2");
    if (chain.depth() < w)
        throw std::invalid_argument("unique_terminal_quoters: chain shorter than window");
    std::unordered_set<UserId> distinct;
    for (std::size_t i = chain.users.size() - static_cast<std::size_t>(w);
         i < chain.users.size(); ++i)
        distinct.insert(chain.users[i]);
    return static_cast<int>(distinct.size());
}

std::map<std::pair<int, int>, std::size_t> pingpong_histogram(const Forest& forest, int w) {
    if (w < 2) throw std::invalid_argument("pingpong_histogram: window must be >= 2");
    std::map<std::pair<int, int>, std::size_t> hist;
    for (const auto& tree : forest.trees) {
        for (const auto& chain : enumerate_chains(tree)) {
            if (chain.depth() < w) continue;
            ++hist[{chain.depth(), unique_terminal_quoters(chain, w)}];
        }
    }
    return hist;
}

void write_census_csv(const std::map<int, std::size_t>& paths,
                      const std::map<int, std::size_t>& nodes, std::ostream& out) {
    out << "mode,depth,count\n";
    for (const auto& [d, c] : paths) out << "paths," << d << ',' << c << '\n';
    for (const auto& [d, c] : nodes) out << "nodes," << d << ',' << c << '\n';
}

void write_pingpong_csv(
    const std::vector<std::pair<int, std::map<std::pair<int, int>, std::size_t>>>& hists,
    std::ostream& out) {
    out << "depth,unique_quoters,count,window\n";
    for (const auto& [w, hist] : hists)
        for (const auto& [key, count] : hist)
            out << key.first << ',' << key.second << ',' << count << ',' << w << '\n';
}

}  // namespace qf
