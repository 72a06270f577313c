#pragma once
// Forest dump format: tree_id,tweet_id,parent_tweet_id,user_id,depth with an
// empty parent on root rows, plus a tree_id,user_id retweeters dump.

#include <iosfwd>
#include <span>

#include "qf/forest.hpp"

namespace qf {

void write_forest_csv(const Forest& forest, std::ostream& out);
void write_retweeters_csv(const Forest& forest, std::ostream& out);

// Rebuilds trees from the two dumps, revalidating depths and connectivity.
Forest read_forest_csv(std::istream& forest_in, std::istream& retweeters_in);

void write_trees_per_user_csv(const std::map<UserId, RootUserStats>& stats, std::ostream& out);
void write_coverage_csv(std::span<const double> quantiles,
                        std::span<const std::size_t> cutoffs, std::ostream& out);

}  // namespace qf
