#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "qf/ingest.hpp"
#include "qf/rng.hpp"
#include "oracles.hpp"

using namespace qf;

TEST_CASE("event line parses with direct field mapping") {
    std::istringstream in(R"({"id":"7","uid":"a","ts":100,"kind":"quote","ref":"3"})");
    auto res = parse_events(in);
    REQUIRE(res.events.size() == 1);
    const auto& ev = res.events[0];
    CHECK(ev.tweet_id == "7");
    CHECK(ev.user_id == "a");
    CHECK(ev.timestamp == 100);
    CHECK(ev.kind == EventKind::quote);
    REQUIRE(ev.ref_tweet_id.has_value());
    CHECK(*ev.ref_tweet_id == "3");
}

TEST_CASE("quote without ref fails with line number") {
    std::istringstream in("{\"id\":\"1\",\"uid\":\"a\",\"ts\":1,\"kind\":\"original\"}\n"
                          "{\"id\":\"2\",\"uid\":\"a\",\"ts\":2,\"kind\":\"quote\"}\n");
    try {
        parse_events(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line_number == 2);
        CHECK(std::string(e.what()).find("missing ref_tweet_id") != std::string::npos);
    }
}

TEST_CASE("empty input yields an empty sequence") {
    std::istringstream in("");
    auto res = parse_events(in);
    CHECK(res.events.empty());
    CHECK(res.blank_lines == 0);
}

TEST_CASE("blank lines are skipped and counted") {
    std::istringstream in("\n  \n{\"id\":\"1\",\"uid\":\"a\",\"ts\":1,\"kind\":\"original\"}\n\n");
    auto res = parse_events(in);
    CHECK(res.events.size() == 1);
    CHECK(res.blank_lines == 3);
}

TEST_CASE("invariant violations are rejected") {
    SUBCASE("original with ref") {
        std::istringstream in(R"({"id":"1","uid":"a","ts":1,"kind":"original","ref":"9"})");
        CHECK_THROWS_AS(parse_events(in), ParseError);
    }
    SUBCASE("unknown kind") {
        std::istringstream in(R"({"id":"1","uid":"a","ts":1,"kind":"reply","ref":"9"})");
        CHECK_THROWS_AS(parse_events(in), ParseError);
    }
    SUBCASE("non-integer ts") {
        std::istringstream in(R"({"id":"1","uid":"a","ts":1.5,"kind":"original"})");
        CHECK_THROWS_AS(parse_events(in), ParseError);
    }
    SUBCASE("not json") {
        std::istringstream in("garbage");
        CHECK_THROWS_AS(parse_events(in), ParseError);
    }
    SUBCASE("duplicate tweet id fails even in lenient mode") {
        std::string two = "{\"id\":\"1\",\"uid\":\"a\",\"ts\":1,\"kind\":\"original\"}\n"
                          "{\"id\":\"1\",\"uid\":\"b\",\"ts\":2,\"kind\":\"original\"}\n";
        std::istringstream strict(two), lenient(two);
        CHECK_THROWS_AS(parse_events(strict), ParseError);
        CHECK_THROWS_AS(parse_events(lenient, {.lenient = true}), ParseError);
    }
}

TEST_CASE("lenient mode skips malformed records and counts them") {
    std::istringstream in("{\"id\":\"1\",\"uid\":\"a\",\"ts\":1,\"kind\":\"original\"}\n"
                          "not json at all\n"
                          "{\"id\":\"2\",\"uid\":\"b\",\"ts\":2,\"kind\":\"retweet\",\"ref\":\"1\"}\n");
    auto res = parse_events(in, {.lenient = true});
    CHECK(res.events.size() == 2);
    CHECK(res.malformed_skipped == 1);
}

TEST_CASE("parse after serialize is the identity on valid sequences") {
    Rng rng(20240811);
    for (int rep = 0; rep < 50; ++rep) {
        auto set = oracle::random_event_set(rng, 60, "rt" + std::to_string(rep));
        std::ostringstream out;
        serialize_events(set.events, out);
        std::istringstream in(out.str());
        auto res = parse_events(in);
        REQUIRE(res.events.size() == set.events.size());
        CHECK(res.events == set.events);
    }
}

namespace {

UserStats user(const char* id, std::int64_t followers, std::int64_t tweets, double lang) {
    return {id, followers, tweets, lang};
}

}  // namespace

TEST_CASE("user stats parsing") {
    std::istringstream in("user_id,follower_count,tweet_count,lang_share\n"
                          "a,195,12,0.80\n"
                          "b,0,0,0.000000\n");
    auto stats = parse_user_stats(in);
    REQUIRE(stats.size() == 2);
    CHECK(stats[0].user_id == "a");
    CHECK(stats[0].follower_count == 195);
    CHECK(stats[0].tweet_count_window == 12);
    CHECK(stats[0].lang_share == doctest::Approx(0.8));

    SUBCASE("lang_share outside [0,1] rejected") {
        std::istringstream bad("user_id,follower_count,tweet_count,lang_share\na,1,1,1.2\n");
        CHECK_THROWS_AS(parse_user_stats(bad), ParseError);
    }
    SUBCASE("bad header rejected") {
        std::istringstream bad("uid,followers,tweets,lang\n");
        CHECK_THROWS_AS(parse_user_stats(bad), ParseError);
    }
    SUBCASE("negative counts rejected") {
        std::istringstream bad("user_id,follower_count,tweet_count,lang_share\na,-3,1,0.5\n");
        CHECK_THROWS_AS(parse_user_stats(bad), ParseError);
    }
}

TEST_CASE("perimeter thresholds follow the collection rules") {
    PerimeterConfig fixed;
    fixed.fixed_follower_threshold = 195;

    SUBCASE("minimum activity: 4 tweets excluded, 5 kept") {
        auto out4 = apply_perimeter(std::vector{user("a", 1000, 4, 1.0)}, fixed);
        CHECK(out4.empty());
        auto out5 = apply_perimeter(std::vector{user("a", 1000, 5, 1.0)}, fixed);
        CHECK(out5.count("a") == 1);
    }
    SUBCASE("minimum visibility is strictly above the threshold") {
        auto at = apply_perimeter(std::vector{user("a", 195, 5, 1.0)}, fixed);
        CHECK(at.empty());
        auto above = apply_perimeter(std::vector{user("a", 196, 5, 1.0)}, fixed);
        CHECK(above.count("a") == 1);
    }
    SUBCASE("minimum language share") {
        auto out = apply_perimeter(std::vector{user("a", 500, 50, 0.10)}, fixed);
        CHECK(out.empty());
        auto kept = apply_perimeter(std::vector{user("a", 500, 50, 0.15)}, fixed);
        CHECK(kept.count("a") == 1);
    }
}

TEST_CASE("median mode uses the lower median over the full input") {
    std::vector<UserStats> users{
        user("a", 10, 9, 1.0), user("b", 20, 9, 1.0), user("c", 30, 9, 1.0),
        user("d", 40, 9, 1.0)};
    CHECK(lower_median_followers(users) == 20);  // even count, lower middle
    auto out = apply_perimeter(users, {});
    // Threshold 20, strictly above: c and d survive.
    CHECK(out == std::unordered_set<UserId>{"c", "d"});

    SUBCASE("empty input with median mode is an error") {
        std::vector<UserStats> none;
        CHECK_THROWS(apply_perimeter(none, {}));
    }
}

TEST_CASE("perimeter is monotone and order independent") {
    Rng rng(7);
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<UserStats> users;
        int n = 1 + static_cast<int>(rng.next_u64() % 30);
        for (int i = 0; i < n; ++i)
            users.push_back(user(("u" + std::to_string(i)).c_str(),
                                 static_cast<std::int64_t>(rng.next_u64() % 400),
                                 static_cast<std::int64_t>(rng.next_u64() % 12),
                                 rng.uniform01()));
        PerimeterConfig strict;
        strict.min_tweets = 5;
        strict.min_lang_share = 0.3;
        strict.fixed_follower_threshold = 150;
        PerimeterConfig relaxed;  // each threshold loosened
        relaxed.min_tweets = 2;
        relaxed.min_lang_share = 0.1;
        relaxed.fixed_follower_threshold = 50;

        auto tight = apply_perimeter(users, strict);
        auto loose = apply_perimeter(users, relaxed);
        for (const auto& id : tight) CHECK(loose.count(id) == 1);

        auto shuffled = users;
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.next_u64() % i]);
        CHECK(apply_perimeter(shuffled, strict) == tight);
        CHECK(apply_perimeter(shuffled, relaxed) == loose);
    }
}
