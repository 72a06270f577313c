#pragma once
// Event-stream and user-statistics parsing plus the perimeter filter that
// selects the analysis user set (minimum activity, minimum visibility,
// minimum language share).

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "qf/types.hpp"

namespace qf {

// Malformed record in strict mode. what() carries "line N: reason".
struct ParseError : std::runtime_error {
    ParseError(std::size_t line, const std::string& reason);
    std::size_t line_number;
};

struct ParseOptions {
    // Lenient mode skips malformed records instead of failing the run.
    bool lenient = false;
};

struct ParseResult {
    std::vector<TweetEvent> events;
    std::size_t blank_lines = 0;
    std::size_t malformed_skipped = 0;  // only populated in lenient mode
};

// Newline-delimited records: {"id":...,"uid":...,"ts":...,"kind":...,"ref":...}.
// Events come back in input order. Duplicate tweet ids are a dataset
// invariant violation and fail the run even in lenient mode.
ParseResult parse_events(std::istream& in, const ParseOptions& opts = {});

// Canonical single-line form accepted back by parse_events.
std::string serialize_event(const TweetEvent& ev);
void serialize_events(std::span<const TweetEvent> events, std::ostream& out);

// Delimited text with header user_id,follower_count,tweet_count,lang_share.
std::vector<UserStats> parse_user_stats(std::istream& in);

// Lower median for even counts.
std::int64_t lower_median_followers(std::span<const UserStats> users);

// Users passing tweet_count_window >= min_tweets, follower_count strictly
// above the threshold, and lang_share >= min_lang_share. Median-mode
// threshold is computed over the full input set.
std::unordered_set<UserId> apply_perimeter(std::span<const UserStats> users,
                                           const PerimeterConfig& cfg);

}  // namespace qf
