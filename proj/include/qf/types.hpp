#pragma once
// Core domain types shared across the pipeline: tweet events, user
// statistics and the perimeter configuration that selects analysis users.

#include <cstdint>
#include <optional>
#include <string>

namespace qf {

using TweetId = std::string;
using UserId = std::string;

enum class EventKind { original, retweet, quote };

const char* to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(const std::string& s);

// One original/retweet/quote record of the input stream.
// ref_tweet_id is present exactly when kind != original.
struct TweetEvent {
    TweetId tweet_id;
    UserId user_id;
    std::int64_t timestamp = 0;
    EventKind kind = EventKind::original;
    std::optional<TweetId> ref_tweet_id;

    bool operator==(const TweetEvent&) const = default;
};

struct UserStats {
    UserId user_id;
    std::int64_t follower_count = 0;
    std::int64_t tweet_count_window = 0;
    double lang_share = 0.0;  // fraction of tweets in the target language, in [0,1]
};

// Perimeter filters: minimum activity, minimum visibility (strictly above a
// follower threshold) and minimum language share. The follower threshold is
// either recomputed as the lower median of the input or fixed explicitly.
struct PerimeterConfig {
    std::int64_t min_tweets = 5;
    std::optional<std::int64_t> fixed_follower_threshold;  // nullopt = median of input
    double min_lang_share = 0.15;
};

}  // namespace qf
