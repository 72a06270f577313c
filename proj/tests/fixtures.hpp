#pragma once
// Hand-built fixtures shared across test binaries: direct QuoteTree
// construction and the transcription of the three-tree frame table.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "qf/forest.hpp"
#include "qf/metrics.hpp"

namespace fixtures {

struct QuoteSpec {
    std::string tweet_id;
    std::string user_id;
    std::string parent_tweet_id;
};

// Builds a tree from explicit quote rows; parents must precede children.
inline qf::QuoteTree make_tree(const std::string& root_tweet, const std::string& root_user,
                               const std::vector<QuoteSpec>& quotes,
                               std::vector<qf::UserId> retweeters = {}) {
    qf::QuoteTree tree;
    tree.nodes.push_back({root_tweet, root_user, -1, 0});
    std::map<std::string, std::int32_t> index{{root_tweet, 0}};
    for (const auto& q : quotes) {
        std::int32_t parent = index.at(q.parent_tweet_id);
        index[q.tweet_id] = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.push_back({q.tweet_id, q.user_id, parent, tree.nodes[parent].depth + 1});
    }
    std::sort(retweeters.begin(), retweeters.end());
    retweeters.erase(std::unique(retweeters.begin(), retweeters.end()), retweeters.end());
    tree.retweeter_ids = std::move(retweeters);
    return tree;
}

inline qf::Forest make_forest(std::vector<qf::QuoteTree> trees) {
    std::sort(trees.begin(), trees.end(), [](const qf::QuoteTree& a, const qf::QuoteTree& b) {
        return a.tree_id() < b.tree_id();
    });
    qf::Forest f;
    f.trees = std::move(trees);
    return f;
}

// ---------------------------------------------------------------------------
// Frame-table transcription. Index order: [tree][frame][class] with classes
// ordered left, center, right; trees named T1, T2, T3; frames A..H.
// ---------------------------------------------------------------------------

inline constexpr int kFrameCounts[3][8][3] = {
    // T1        left center right
    {{13, 2, 4},  // A
     {19, 1, 11}, // B
     {8, 2, 4},   // C
     {9, 5, 6},   // D
     {2, 0, 0},   // E
     {7, 2, 9},   // F
     {3, 1, 2},   // G
     {1, 0, 1}},  // H
    // T2
    {{10, 5, 11},
     {17, 5, 9},
     {13, 8, 12},
     {3, 3, 3},
     {1, 2, 1},
     {5, 2, 6},
     {1, 0, 3},
     {3, 5, 6}},
    // T3
    {{5, 1, 11},
     {7, 4, 6},
     {7, 4, 25},
     {5, 2, 10},
     {1, 0, 3},
     {2, 0, 13},
     {2, 4, 8},
     {3, 2, 7}},
};

// Printed integer percentages.
inline constexpr int kFramePcts[3][8][3] = {
    {{30, 17, 13},
     {43, 8, 37},
     {18, 17, 13},
     {20, 42, 20},
     {5, 0, 0},
     {16, 17, 30},
     {7, 8, 7},
     {2, 0, 3}},
    {{31, 21, 31},
     {53, 21, 25},
     {41, 33, 33},
     {9, 13, 8},
     {3, 8, 3},
     {16, 8, 17},
     {3, 0, 8},
     {9, 21, 17}},
    {{23, 7, 17},
     {32, 29, 9},
     {32, 29, 38},
     {23, 14, 15},
     {5, 0, 5},
     {9, 0, 20},
     {9, 29, 12},
     {14, 14, 11}},
};

// Distinct annotated quotes per tree and class, consistent with the printed
// percentages (count / total rounds half-away-from-zero to the integers
// above).
inline constexpr int kClassTotals[3][3] = {
    {44, 12, 30},
    {32, 24, 36},
    {22, 14, 65},
};

struct Table1Fixture {
    std::vector<qf::FrameAnnotation> annotations;
    qf::QuoteAuthorMap quotes;
    qf::IpMap ip;
    std::array<std::string, 3> tree_ids{"T1", "T2", "T3"};
};

// Realizes the transcribed counts: per (tree, class) column, kClassTotals
// distinct quotes receive frame labels round-robin so each frame hits its
// exact count and every quote carries at least one label.
inline Table1Fixture table1_fixture() {
    Table1Fixture fx;
    const std::array<std::string, 3> class_user{"user_left", "user_center", "user_right"};
    fx.ip[class_user[0]] = -1.0;
    fx.ip[class_user[1]] = 0.0;
    fx.ip[class_user[2]] = 1.0;

    for (int t = 0; t < 3; ++t) {
        for (int c = 0; c < 3; ++c) {
            const int total = kClassTotals[t][c];
            std::vector<std::vector<char>> labels(static_cast<std::size_t>(total));
            int pos = 0;
            for (int f = 0; f < 8; ++f) {
                int count = kFrameCounts[t][f][c];
                for (int k = 0; k < count; ++k)
                    labels[static_cast<std::size_t>((pos + k) % total)].push_back(
                        static_cast<char>('A' + f));
                pos = (pos + count) % total;
            }
            for (int i = 0; i < total; ++i) {
                std::string tweet = fx.tree_ids[t] + "_c" + std::to_string(c) + "_q" +
                                    std::to_string(i);
                fx.quotes.emplace(tweet, qf::QuoteRef{fx.tree_ids[t], class_user[c]});
                fx.annotations.push_back({tweet, labels[static_cast<std::size_t>(i)]});
            }
        }
    }
    return fx;
}

}  // namespace fixtures
