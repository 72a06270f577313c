#pragma once
// Quote-forest construction and per-tree structural measures. Trees are
// recursive cascades of quotes rooted at an eligible tweet; edges where the
// quoter equals the quoted author (self-quote) or falls outside the user
// perimeter are dropped together with their whole subtree.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "qf/types.hpp"

namespace qf {

struct TreeNode {
    TweetId tweet_id;
    UserId user_id;
    std::int32_t parent = -1;  // index into QuoteTree::nodes, -1 at the root
    std::int32_t depth = 0;
};

struct QuoteTree {
    std::vector<TreeNode> nodes;       // nodes[0] is the root; BFS order
    std::vector<UserId> retweeter_ids; // sorted, distinct dry-retweeters of the root

    std::size_t size() const { return nodes.size(); }
    const TreeNode& root() const { return nodes.front(); }
    const TweetId& tree_id() const { return nodes.front().tweet_id; }
};

struct ForestDiagnostics {
    std::size_t dropped_self_quote_edges = 0;
    std::size_t dropped_non_perimeter_edges = 0;
    std::size_t discarded_quoteless_roots = 0;
    std::size_t dangling_retweets = 0;      // retweet ref not in the dataset
    std::size_t retweets_of_non_roots = 0;  // known ref that is not an emitted root
    std::size_t refs_to_retweet_events = 0; // quote refs resolving to a retweet id
};

struct Forest {
    std::vector<QuoteTree> trees;  // ordered by root tweet id
    ForestDiagnostics diag;
};

// Roots: original tweets, or quotes whose target is outside the dataset,
// authored by perimeter users with timestamp in [t0, t1]. Quote edges are
// resolved by reference, so the result does not depend on event order.
// Trees with no surviving quote are discarded.
Forest build_forest(std::span<const TweetEvent> events,
                    const std::unordered_set<UserId>& perimeter,
                    std::int64_t t0, std::int64_t t1);

// Mean distance from the root over the non-root nodes. Requires size >= 2.
double avg_depth(const QuoteTree& tree);

// For each quantile q, the smallest tree size s such that trees of size <= s
// contain at least q of all forest nodes.
std::vector<std::size_t> size_coverage_thresholds(const Forest& forest,
                                                  std::span<const double> quantiles);

enum class SizeClass { small, medium, large };
const char* to_string(SizeClass c);

// small: size <= c1; medium: c1 < size <= c2; large otherwise.
SizeClass size_class(std::size_t size, std::size_t c1, std::size_t c2);

struct RootUserStats {
    std::size_t n_trees = 0;
    double mean_size = 0.0;
    std::size_t max_size = 0;
};

std::map<UserId, RootUserStats> trees_per_user(const Forest& forest);

}  // namespace qf
