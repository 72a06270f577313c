#pragma once
// Root-to-leaf chain census and terminal-subchain uniqueness statistics,
// the "ping-pong" measure over the last w quoters of deep chains.

#include <cstdint>
#include <map>
#include <vector>

#include "qf/forest.hpp"

namespace qf {

// Ordered users from the root author down to a leaf quoter.
struct Chain {
    std::vector<UserId> users;
    int depth() const { return static_cast<int>(users.size()) - 1; }
};

std::vector<Chain> enumerate_chains(const QuoteTree& tree);

enum class CensusMode {
    paths,  // root-to-leaf paths reaching depth d
    nodes,  // nodes at depth >= d
};
const char* to_string(CensusMode m);

// Cumulative census: census[d] counts chains (or nodes) with depth >= d, so
// the map is nonincreasing in d. Keys run from 1 to the maximal depth.
std::map<int, std::size_t> chain_census(const Forest& forest,
                                        CensusMode mode = CensusMode::paths);

// Distinct users among the last w quoters (authors at depth >= 1) of a
// chain. Requires chain depth >= w; the root author never enters the window.
int unique_terminal_quoters(const Chain& chain, int w);

// Histogram over chains with depth >= w keyed by (chain depth, distinct
// terminal quoters). Each root-to-leaf chain counts once.
std::map<std::pair<int, int>, std::size_t> pingpong_histogram(const Forest& forest, int w);

void write_census_csv(const std::map<int, std::size_t>& paths,
                      const std::map<int, std::size_t>& nodes, std::ostream& out);
// depth,unique_quoters,count,window rows for every requested window.
void write_pingpong_csv(
    const std::vector<std::pair<int, std::map<std::pair<int, int>, std::size_t>>>& hists,
    std::ostream& out);

}  // namespace qf
