#include "qf/forest.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>
#include <unordered_map>

namespace qf {

Forest build_forest(std::span<const TweetEvent> events,
                    const std::unordered_set<UserId>& perimeter,
                    std::int64_t t0, std::int64_t t1) {
    if (t0 > t1) throw std::invalid_argument("build_forest: root window not well-ordered");

    Forest forest;

    // Reference index over quotable events (originals and quotes). Retweets
    // are not content nodes; a quote pointing at a retweet id is treated as
    // pointing outside the dataset.
    std::unordered_map<std::string, std::size_t> quotable;
    std::unordered_set<std::string> retweet_ids;
    std::unordered_set<std::string> all_ids;
    quotable.reserve(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        if (!all_ids.insert(ev.tweet_id).second)
            throw std::runtime_error("build_forest: duplicate tweet id \"" + ev.tweet_id + "\"");
        if (ev.kind == EventKind::retweet)
            retweet_ids.insert(ev.tweet_id);
        else
            quotable.emplace(ev.tweet_id, i);
        if (ev.kind != EventKind::original && !ev.ref_tweet_id)
            throw std::runtime_error("build_forest: event \"" + ev.tweet_id + "\" missing ref");
    }

    // Children by quoted tweet id, and root candidates.
    std::unordered_map<std::string, std::vector<std::size_t>> children;
    std::vector<std::size_t> root_candidates;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        if (ev.kind == EventKind::original) {
            if (perimeter.count(ev.user_id) && ev.timestamp >= t0 && ev.timestamp <= t1)
                root_candidates.push_back(i);
        } else if (ev.kind == EventKind::quote) {
            if (quotable.count(*ev.ref_tweet_id)) {
                children[*ev.ref_tweet_id].push_back(i);
            } else {
                if (retweet_ids.count(*ev.ref_tweet_id)) ++forest.diag.refs_to_retweet_events;
                // Quote of a tweet outside the dataset starts its own cascade.
                if (perimeter.count(ev.user_id) && ev.timestamp >= t0 && ev.timestamp <= t1)
                    root_candidates.push_back(i);
            }
        }
    }

    // Deterministic emission order regardless of input order.
    std::sort(root_candidates.begin(), root_candidates.end(),
              [&](std::size_t a, std::size_t b) { return events[a].tweet_id < events[b].tweet_id; });
    for (auto& [id, kids] : children)
        std::sort(kids.begin(), kids.end(),
                  [&](std::size_t a, std::size_t b) { return events[a].tweet_id < events[b].tweet_id; });

    std::unordered_map<std::string, std::size_t> root_tweet_to_tree;
    for (std::size_t ri : root_candidates) {
        QuoteTree tree;
        tree.nodes.push_back({events[ri].tweet_id, events[ri].user_id, -1, 0});
        std::size_t n_quotes = 0;
        std::deque<std::size_t> frontier{0};  // node indices
        while (!frontier.empty()) {
            std::size_t ni = frontier.front();
            frontier.pop_front();
            auto it = children.find(tree.nodes[ni].tweet_id);
            if (it == children.end()) continue;
            for (std::size_t qi : it->second) {
                const auto& q = events[qi];
                if (q.user_id == tree.nodes[ni].user_id) {
                    ++forest.diag.dropped_self_quote_edges;
                    continue;  // subtree dropped with the edge
                }
                if (!perimeter.count(q.user_id)) {
                    ++forest.diag.dropped_non_perimeter_edges;
                    continue;
                }
                tree.nodes.push_back({q.tweet_id, q.user_id,
                                      static_cast<std::int32_t>(ni),
                                      tree.nodes[ni].depth + 1});
                ++n_quotes;
                frontier.push_back(tree.nodes.size() - 1);
            }
        }
        if (n_quotes == 0) {
            ++forest.diag.discarded_quoteless_roots;
            continue;
        }
        // BFS above follows child order sorted by tweet id but not across
        // depths; normalize to (depth, tweet_id) with parent reindexing.
        std::vector<std::size_t> order(tree.nodes.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (tree.nodes[a].depth != tree.nodes[b].depth)
                return tree.nodes[a].depth < tree.nodes[b].depth;
            return tree.nodes[a].tweet_id < tree.nodes[b].tweet_id;
        });
        std::vector<std::int32_t> new_index(tree.nodes.size());
        for (std::size_t i = 0; i < order.size(); ++i)
            new_index[order[i]] = static_cast<std::int32_t>(i);
        std::vector<TreeNode> sorted;
        sorted.reserve(tree.nodes.size());
        for (std::size_t i : order) {
            TreeNode n = tree.nodes[i];
            if (n.parent >= 0) n.parent = new_index[n.parent];
            sorted.push_back(std::move(n));
        }
        tree.nodes = std::move(sorted);
        root_tweet_to_tree.emplace(tree.tree_id(), forest.trees.size());
        forest.trees.push_back(std::move(tree));
    }

    // Dry retweeters of emitted roots, root author excluded, collapsed to a set.
    std::unordered_map<std::size_t, std::unordered_set<UserId>> retweeters;
    for (const auto& ev : events) {
        if (ev.kind != EventKind::retweet) continue;
        if (!all_ids.count(*ev.ref_tweet_id)) {
            ++forest.diag.dangling_retweets;
            continue;
        }
        auto it = root_tweet_to_tree.find(*ev.ref_tweet_id);
        if (it == root_tweet_to_tree.end()) {
            ++forest.diag.retweets_of_non_roots;
            continue;
        }
        const QuoteTree& tree = forest.trees[it->second];
        if (ev.user_id == tree.root().user_id) continue;
        retweeters[it->second].insert(ev.user_id);
    }
    for (auto& [ti, users] : retweeters) {
        auto& ids = forest.trees[ti].retweeter_ids;
        ids.assign(users.begin(), users.end());
        std::sort(ids.begin(), ids.end());
    }

    return forest;
}

double avg_depth(const QuoteTree& tree) {
    if (tree.size() < 2) throw std::invalid_argument("avg_depth: tree must have size >= 2");
    std::int64_t total = 0;
    for (const auto& n : tree.nodes) total += n.depth;
    return static_cast<double>(total) / static_cast<double>(tree.size() - 1);
}

std::vector<std::size_t> size_coverage_thresholds(const Forest& forest,
                                                  std::span<const double> quantiles) {
    if (forest.trees.empty())
        throw std::invalid_argument("size_coverage_thresholds: empty forest");
    for (double q : quantiles)
        if (!(q > 0.0 && q <= 1.0))
            throw std::invalid_argument("size_coverage_thresholds: quantile outside (0,1]");

    // Nodes contained in trees of size <= s, cumulated over distinct sizes.
    std::map<std::size_t, std::size_t> nodes_by_size;
    std::size_t total_nodes = 0;
    for (const auto& t : forest.trees) {
        nodes_by_size[t.size()] += t.size();
        total_nodes += t.size();
    }
    std::vector<std::pair<std::size_t, std::size_t>> cum;  // (size, cumulative nodes)
    std::size_t acc = 0;
    for (auto [size, nodes] : nodes_by_size) {
        acc += nodes;
        cum.emplace_back(size, acc);
    }

    std::vector<std::size_t> cutoffs;
    cutoffs.reserve(quantiles.size());
    for (double q : quantiles) {
        double target = q * static_cast<double>(total_nodes);
        std::size_t cutoff = cum.back().first;
        for (const auto& [size, nodes] : cum) {
            if (static_cast<double>(nodes) >= target) {
                cutoff = size;
                break;
            }
        }
        cutoffs.push_back(cutoff);
    }
    return cutoffs;
}

const char* to_string(SizeClass c) {
    switch (c) {
        case SizeClass::small: return "small";
        case SizeClass::medium: return "medium";
        case SizeClass::large: return "large";
    }
    return "?";
}

SizeClass size_class(std::size_t size, std::size_t c1, std::size_t c2) {
    if (c1 > c2) throw std::invalid_argument("size_class: cutoffs not ascending");
    if (size <= c1) return SizeClass::small;
    if (size <= c2) return SizeClass::medium;
    return SizeClass::large;
}

std::map<UserId, RootUserStats> trees_per_user(const Forest& forest) {
    std::map<UserId, RootUserStats> out;
    for (const auto& t : forest.trees) {
        auto& s = out[t.root().user_id];
        ++s.n_trees;
        s.mean_size += static_cast<double>(t.size());
        s.max_size = std::max(s.max_size, t.size());
    }
    for (auto& [user, s] : out) s.mean_size /= static_cast<double>(s.n_trees);
    return out;
}

}  // namespace qf
