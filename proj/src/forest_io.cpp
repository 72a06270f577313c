#include "qf/forest_io.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "qf/io_util.hpp"

namespace qf {

void write_forest_csv(const Forest& forest, std::ostream& out) {
    out << "tree_id,tweet_id,parent_tweet_id,user_id,depth\n";
    for (const auto& tree : forest.trees) {
        for (const auto& n : tree.nodes) {
            out << tree.tree_id() << ',' << n.tweet_id << ','
                << (n.parent >= 0 ? tree.nodes[n.parent].tweet_id : std::string{}) << ','
                << n.user_id << ',' << n.depth << '\n';
        }
    }
}

void write_retweeters_csv(const Forest& forest, std::ostream& out) {
    out << "tree_id,user_id\n";
    for (const auto& tree : forest.trees)
        for (const auto& u : tree.retweeter_ids) out << tree.tree_id() << ',' << u << '\n';
}

namespace {

struct NodeRow {
    TweetId tweet_id;
    TweetId parent_tweet_id;  // empty at root
    UserId user_id;
    std::int32_t depth;
};

}  // namespace

Forest read_forest_csv(std::istream& forest_in, std::istream& retweeters_in) {
    std::map<TweetId, std::vector<NodeRow>> rows_by_tree;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(forest_in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_line(line);
        if (!header) {
            if (f != std::vector<std::string>{"tree_id", "tweet_id", "parent_tweet_id", "user_id", "depth"})
                throw std::runtime_error("forest csv: bad header");
            header = true;
            continue;
        }
        if (f.size() != 5) throw std::runtime_error("forest csv line " + std::to_string(lineno) + ": expected 5 fields");
        std::int64_t depth = 0;
        if (!parse_i64(f[4], depth) || depth < 0)
            throw std::runtime_error("forest csv line " + std::to_string(lineno) + ": bad depth");
        rows_by_tree[f[0]].push_back({f[1], f[2], f[3], static_cast<std::int32_t>(depth)});
    }
    if (!header) throw std::runtime_error("forest csv: missing header");

    Forest forest;
    for (auto& [tree_id, rows] : rows_by_tree) {
        std::stable_sort(rows.begin(), rows.end(), [](const NodeRow& a, const NodeRow& b) {
            if (a.depth != b.depth) return a.depth < b.depth;
            return a.tweet_id < b.tweet_id;
        });
        QuoteTree tree;
        std::unordered_map<TweetId, std::int32_t> index;
        for (const auto& r : rows) {
            TreeNode n;
            n.tweet_id = r.tweet_id;
            n.user_id = r.user_id;
            n.depth = r.depth;
            if (r.parent_tweet_id.empty()) {
                if (r.depth != 0 || !tree.nodes.empty())
                    throw std::runtime_error("forest csv: tree " + tree_id + " has a bad root row");
                n.parent = -1;
            } else {
                auto it = index.find(r.parent_tweet_id);
                if (it == index.end())
                    throw std::runtime_error("forest csv: tree " + tree_id + " node " + r.tweet_id +
                                             " references unknown parent " + r.parent_tweet_id);
                n.parent = it->second;
                if (tree.nodes[n.parent].depth + 1 != n.depth)
                    throw std::runtime_error("forest csv: tree " + tree_id + " node " + r.tweet_id +
                                             " has inconsistent depth");
            }
            index.emplace(n.tweet_id, static_cast<std::int32_t>(tree.nodes.size()));
            tree.nodes.push_back(std::move(n));
        }
        if (tree.nodes.empty() || tree.tree_id() != tree_id)
            throw std::runtime_error("forest csv: tree " + tree_id + " root id mismatch");
        if (tree.size() < 2)
            throw std::runtime_error("forest csv: tree " + tree_id + " has no quotes");
        forest.trees.push_back(std::move(tree));
    }

    // Retweeters attach by tree id; unknown tree ids are an error.
    std::unordered_map<TweetId, std::size_t> tree_index;
    for (std::size_t i = 0; i < forest.trees.size(); ++i)
        tree_index.emplace(forest.trees[i].tree_id(), i);
    lineno = 0;
    header = false;
    while (std::getline(retweeters_in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_line(line);
        if (!header) {
            if (f != std::vector<std::string>{"tree_id", "user_id"})
                throw std::runtime_error("retweeters csv: bad header");
            header = true;
            continue;
        }
        if (f.size() != 2) throw std::runtime_error("retweeters csv line " + std::to_string(lineno) + ": expected 2 fields");
        auto it = tree_index.find(f[0]);
        if (it == tree_index.end())
            throw std::runtime_error("retweeters csv line " + std::to_string(lineno) + ": unknown tree " + f[0]);
        forest.trees[it->second].retweeter_ids.push_back(f[1]);
    }
    if (!header) throw std::runtime_error("retweeters csv: missing header");
    for (auto& tree : forest.trees) {
        auto& ids = tree.retweeter_ids;
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    }
    return forest;
}

void write_trees_per_user_csv(const std::map<UserId, RootUserStats>& stats, std::ostream& out) {
    out << "user_id,n_trees,mean_size,max_size\n";
    for (const auto& [user, s] : stats)
        out << user << ',' << s.n_trees << ',' << format_fixed6(s.mean_size) << ','
            << s.max_size << '\n';
}

void write_coverage_csv(std::span<const double> quantiles,
                        std::span<const std::size_t> cutoffs, std::ostream& out) {
    out << "q,cutoff\n";
    for (std::size_t i = 0; i < cutoffs.size(); ++i)
        out << format_fixed6(quantiles[i]) << ',' << cutoffs[i] << '\n';
}

}  // namespace qf
