#include "qf/ingest.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "qf/io_util.hpp"

namespace qf {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::original: return "original";
        case EventKind::retweet: return "retweet";
        case EventKind::quote: return "quote";
    }
    return "?";
}

std::optional<EventKind> event_kind_from_string(const std::string& s) {
    if (s == "original") return EventKind::original;
    if (s == "retweet") return EventKind::retweet;
    if (s == "quote") return EventKind::quote;
    return std::nullopt;
}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason), line_number(line) {}

namespace {

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return std::isspace(c); });
}

TweetEvent event_from_json_line(const std::string& line, std::size_t lineno) {
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ParseError(lineno, "not a JSON object");

    TweetEvent ev;
    if (!j.contains("id") || !j["id"].is_string()) throw ParseError(lineno, "missing or non-string id");
    ev.tweet_id = j["id"].get<std::string>();
    if (ev.tweet_id.empty()) throw ParseError(lineno, "empty id");

    if (!j.contains("uid") || !j["uid"].is_string()) throw ParseError(lineno, "missing or non-string uid");
    ev.user_id = j["uid"].get<std::string>();
    if (ev.user_id.empty()) throw ParseError(lineno, "empty uid");

    if (!j.contains("ts") || !j["ts"].is_number_integer()) throw ParseError(lineno, "missing or non-integer ts");
    ev.timestamp = j["ts"].get<std::int64_t>();

    if (!j.contains("kind") || !j["kind"].is_string()) throw ParseError(lineno, "missing or non-string kind");
    auto kind = event_kind_from_string(j["kind"].get<std::string>());
    if (!kind) throw ParseError(lineno, "unknown kind \"" + j["kind"].get<std::string>() + "\"");
    ev.kind = *kind;

    bool has_ref = j.contains("ref") && !j["ref"].is_null();
    if (ev.kind == EventKind::original) {
        if (has_ref) throw ParseError(lineno, "ref_tweet_id present on original");
    } else {
        if (!has_ref) throw ParseError(lineno, "missing ref_tweet_id");
        if (!j["ref"].is_string()) throw ParseError(lineno, "non-string ref");
        ev.ref_tweet_id = j["ref"].get<std::string>();
        if (ev.ref_tweet_id->empty()) throw ParseError(lineno, "empty ref");
    }
    return ev;
}

}  // namespace

ParseResult parse_events(std::istream& in, const ParseOptions& opts) {
    ParseResult res;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) {
            ++res.blank_lines;
            continue;
        }
        TweetEvent ev;
        try {
            ev = event_from_json_line(line, lineno);
        } catch (const ParseError&) {
            if (!opts.lenient) throw;
            ++res.malformed_skipped;
            continue;
        }
        if (!seen_ids.insert(ev.tweet_id).second)
            throw ParseError(lineno, "duplicate tweet id \"" + ev.tweet_id + "\"");
        res.events.push_back(std::move(ev));
    }
    return res;
}

std::string serialize_event(const TweetEvent& ev) {
    std::string s = "{\"id\":\"" + ev.tweet_id + "\",\"uid\":\"" + ev.user_id +
                    "\",\"ts\":" + std::to_string(ev.timestamp) +
                    ",\"kind\":\"" + to_string(ev.kind) + "\"";
    if (ev.ref_tweet_id) s += ",\"ref\":\"" + *ev.ref_tweet_id + "\"";
    s += "}";
    return s;
}

void serialize_events(std::span<const TweetEvent> events, std::ostream& out) {
    for (const auto& ev : events) out << serialize_event(ev) << '\n';
}

std::vector<UserStats> parse_user_stats(std::istream& in) {
    std::vector<UserStats> out;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (is_blank(line)) continue;
        auto fields = split_line(line);
        if (!header_seen) {
            if (fields != std::vector<std::string>{"user_id", "follower_count", "tweet_count", "lang_share"})
                throw ParseError(lineno, "bad user stats header");
            header_seen = true;
            continue;
        }
        if (fields.size() != 4) throw ParseError(lineno, "expected 4 fields");
        UserStats u;
        u.user_id = fields[0];
        if (u.user_id.empty()) throw ParseError(lineno, "empty user_id");
        if (!parse_i64(fields[1], u.follower_count) || u.follower_count < 0)
            throw ParseError(lineno, "bad follower_count");
        if (!parse_i64(fields[2], u.tweet_count_window) || u.tweet_count_window < 0)
            throw ParseError(lineno, "bad tweet_count");
        if (!parse_double(fields[3], u.lang_share) || u.lang_share < 0.0 || u.lang_share > 1.0)
            throw ParseError(lineno, "lang_share outside [0,1]");
        out.push_back(std::move(u));
    }
    if (!header_seen) throw ParseError(lineno == 0 ? 1 : lineno, "missing user stats header");
    return out;
}

std::int64_t lower_median_followers(std::span<const UserStats> users) {
    if (users.empty()) throw std::invalid_argument("median follower threshold needs at least one user");
    std::vector<std::int64_t> counts;
    counts.reserve(users.size());
    for (const auto& u : users) counts.push_back(u.follower_count);
    std::size_t k = (counts.size() - 1) / 2;  // lower median
    std::nth_element(counts.begin(), counts.begin() + k, counts.end());
    return counts[k];
}

std::unordered_set<UserId> apply_perimeter(std::span<const UserStats> users,
                                           const PerimeterConfig& cfg) {
    std::int64_t threshold = cfg.fixed_follower_threshold
                                 ? *cfg.fixed_follower_threshold
                                 : lower_median_followers(users);
    std::unordered_set<UserId> out;
    for (const auto& u : users) {
        if (u.tweet_count_window < cfg.min_tweets) continue;
        if (u.follower_count <= threshold) continue;  // strictly above
        if (u.lang_share < cfg.min_lang_share) continue;
        out.insert(u.user_id);
    }
    return out;
}

}  // namespace qf
