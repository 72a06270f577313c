#include "qf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "qf/io_util.hpp"

namespace qf {

namespace {

constexpr std::uint64_t kStreamPopulation = 11;
constexpr std::uint64_t kStreamElites = 12;
constexpr std::uint64_t kStreamFollowBase = 1u << 22;
constexpr std::uint64_t kStreamForestBase = 1u << 23;
constexpr int kMaxChainDepth = 64;  // safety cap on geometric chain growth

std::string id_of(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%07zu", prefix, i);
    return std::string(buf);
}

}  // namespace

void MixtureSpec::validate() const {
    if (weights.empty() || weights.size() != means.size() || weights.size() != sds.size())
        throw std::invalid_argument("mixture: weights/means/sds must be non-empty and equal length");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw std::invalid_argument("mixture: negative weight");
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("mixture: weights sum to zero");
    for (double s : sds)
        if (!(s > 0.0)) throw std::invalid_argument("mixture: non-positive sd");
}

double MixtureSpec::mixture_mean() const {
    double total = 0.0, m = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        total += weights[i];
        m += weights[i] * means[i];
    }
    return m / total;
}

double MixtureSpec::mixture_variance() const {
    double total = 0.0, second = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        total += weights[i];
        second += weights[i] * (sds[i] * sds[i] + means[i] * means[i]);
    }
    double m = mixture_mean();
    return second / total - m * m;
}

double MixtureSpec::sample(Rng& rng) const {
    std::size_t k = rng.categorical(weights);
    return rng.normal(means[k], sds[k]);
}

MixtureSpec default_mixture() {
    return {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, {-1.0, 0.0, 1.0}, {0.3, 0.3, 0.3}};
}

void SynthConfig::validate() const {
    user_theta.validate();
    elite_phi.validate();
    if (n_users < 1 || n_elites < 1) throw std::invalid_argument("synth config: need users and elites");
    if (n_roots < 0) throw std::invalid_argument("synth config: negative n_roots");
    if (!(gamma >= 0.0)) throw std::invalid_argument("synth config: negative gamma");
    if (!(sigma_r > 0.0) || !(sigma_q > 0.0)) throw std::invalid_argument("synth config: kernel scales must be > 0");
    if (!(lambda_cross >= 0.0)) throw std::invalid_argument("synth config: negative lambda_cross");
    if (!(p_depth >= 0.0 && p_depth < 1.0)) throw std::invalid_argument("synth config: p_depth outside [0,1)");
    if (!(kappa >= 0.0)) throw std::invalid_argument("synth config: negative kappa");
    if (!(root_center_bias >= 0.0)) throw std::invalid_argument("synth config: negative root_center_bias");
    if (!(mean_retweets_per_root >= 0.0) || !(mean_quotes_per_root >= 0.0))
        throw std::invalid_argument("synth config: negative event means");
    if (!(alpha_sd >= 0.0) || !(beta_sd >= 0.0) || !(depth2_noise_sd >= 0.0))
        throw std::invalid_argument("synth config: negative sd");
}

namespace {

double require_number(const nlohmann::json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw std::runtime_error(std::string("synth config: missing field \"") + field + "\"");
    return j[field].get<double>();
}

MixtureSpec mixture_from_json(const nlohmann::json& j, const char* field) {
    const auto& m = j[field];
    MixtureSpec spec;
    for (const char* key : {"weights", "means", "sds"}) {
        if (!m.contains(key) || !m[key].is_array())
            throw std::runtime_error(std::string("synth config: mixture \"") + field +
                                     "\" missing array \"" + key + "\"");
    }
    spec.weights = m["weights"].get<std::vector<double>>();
    spec.means = m["means"].get<std::vector<double>>();
    spec.sds = m["sds"].get<std::vector<double>>();
    spec.validate();
    return spec;
}

}  // namespace

SynthConfig parse_synth_config(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw std::runtime_error("synth config: not a JSON object");

    SynthConfig cfg;
    cfg.seed = static_cast<std::uint64_t>(require_number(j, "seed"));
    cfg.n_users = static_cast<int>(require_number(j, "n_users"));
    cfg.n_elites = static_cast<int>(require_number(j, "n_elites"));
    cfg.n_roots = static_cast<int>(require_number(j, "n_roots"));
    cfg.gamma = require_number(j, "gamma");
    cfg.root_center_bias = require_number(j, "root_center_bias");
    cfg.sigma_r = require_number(j, "sigma_r");
    cfg.sigma_q = require_number(j, "sigma_q");
    cfg.lambda_cross = require_number(j, "lambda_cross");
    cfg.p_depth = require_number(j, "p_depth");
    cfg.kappa = require_number(j, "kappa");

    if (j.contains("user_theta")) cfg.user_theta = mixture_from_json(j, "user_theta");
    if (j.contains("elite_phi")) cfg.elite_phi = mixture_from_json(j, "elite_phi");
    if (j.contains("mean_retweets_per_root")) cfg.mean_retweets_per_root = j["mean_retweets_per_root"].get<double>();
    if (j.contains("mean_quotes_per_root")) cfg.mean_quotes_per_root = j["mean_quotes_per_root"].get<double>();
    if (j.contains("alpha_mean")) cfg.alpha_mean = j["alpha_mean"].get<double>();
    if (j.contains("alpha_sd")) cfg.alpha_sd = j["alpha_sd"].get<double>();
    if (j.contains("beta_sd")) cfg.beta_sd = j["beta_sd"].get<double>();
    if (j.contains("depth2_noise_sd")) cfg.depth2_noise_sd = j["depth2_noise_sd"].get<double>();
    if (j.contains("probit_link")) cfg.probit_link = j["probit_link"].get<bool>();
    cfg.validate();
    return cfg;
}

Population gen_population(const SynthConfig& cfg) {
    cfg.validate();
    Rng base(cfg.seed);
    Population pop;

    Rng users_rng = base.fork(kStreamPopulation);
    pop.users.reserve(cfg.n_users);
    for (int i = 0; i < cfg.n_users; ++i) {
        SynthUser u;
        u.id = id_of("u", static_cast<std::size_t>(i));
        u.theta = cfg.user_theta.sample(users_rng);
        u.beta = users_rng.normal(0.0, cfg.beta_sd);
        pop.users.push_back(std::move(u));
    }

    Rng elites_rng = base.fork(kStreamElites);
    pop.elites.reserve(cfg.n_elites);
    for (int j = 0; j < cfg.n_elites; ++j) {
        SynthElite e;
        e.id = id_of("e", static_cast<std::size_t>(j));
        e.phi = cfg.elite_phi.sample(elites_rng);
        e.alpha = elites_rng.normal(cfg.alpha_mean, cfg.alpha_sd);
        pop.elites.push_back(std::move(e));
    }
    return pop;
}

double follow_link(double eta, bool probit) {
    if (probit) return 0.5 * std::erfc(-eta / std::sqrt(2.0));
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    double e = std::exp(eta);
    return e / (1.0 + e);
}

FollowMatrix gen_follow_matrix(const Population& pop, const SynthConfig& cfg) {
    FollowMatrix m;
    m.elite_ids.reserve(pop.elites.size());
    for (const auto& e : pop.elites) m.elite_ids.push_back(e.id);
    m.user_ids.reserve(pop.users.size());
    m.rows.reserve(pop.users.size());

    Rng base(cfg.seed);
    for (std::size_t i = 0; i < pop.users.size(); ++i) {
        Rng rng = base.fork(kStreamFollowBase + i);
        std::vector<std::int32_t> row;
        for (std::size_t jj = 0; jj < pop.elites.size(); ++jj) {
            double d = pop.users[i].theta - pop.elites[jj].phi;
            double eta = pop.elites[jj].alpha + pop.users[i].beta - cfg.gamma * d * d;
            if (rng.bernoulli(follow_link(eta, cfg.probit_link)))
                row.push_back(static_cast<std::int32_t>(jj));
        }
        m.user_ids.push_back(pop.users[i].id);
        m.rows.push_back(std::move(row));
    }
    return m;
}

namespace {

// Users sorted by theta for nearest-valence lookups.
struct ThetaIndex {
    std::vector<std::pair<double, std::size_t>> sorted;  // (theta, user index)

    explicit ThetaIndex(const Population& pop) {
        sorted.reserve(pop.users.size());
        for (std::size_t i = 0; i < pop.users.size(); ++i)
            sorted.emplace_back(pop.users[i].theta, i);
        std::sort(sorted.begin(), sorted.end());
    }

    // Nearest user by theta, excluding one user id; ties resolve to the
    // lower theta for determinism.
    std::size_t nearest_excluding(double target, std::size_t excluded) const {
        auto it = std::lower_bound(sorted.begin(), sorted.end(),
                                   std::make_pair(target, std::size_t{0}));
        auto best = sorted.size();
        double best_dist = 0.0;
        auto consider = [&](std::ptrdiff_t k) {
            if (k < 0 || k >= static_cast<std::ptrdiff_t>(sorted.size())) return;
            const auto& [theta, idx] = sorted[static_cast<std::size_t>(k)];
            if (idx == excluded) return;
            double dist = std::abs(theta - target);
            if (best == sorted.size() || dist < best_dist) {
                best = idx;
                best_dist = dist;
            }
        };
        std::ptrdiff_t at = it - sorted.begin();
        for (std::ptrdiff_t k = at - 2; k <= at + 2; ++k) consider(k);
        if (best == sorted.size())
            throw std::logic_error("nearest_excluding: population too small");
        return best;
    }
};

}  // namespace

SynthForest gen_forest(const Population& pop, const SynthConfig& cfg) {
    cfg.validate();
    if (pop.users.size() < 3) throw std::invalid_argument("gen_forest: need at least 3 users");

    SynthForest out;
    Rng base(cfg.seed);
    ThetaIndex theta_index(pop);

    // Root-author weights biased toward the center.
    std::vector<double> author_weights(pop.users.size());
    for (std::size_t i = 0; i < pop.users.size(); ++i)
        author_weights[i] = std::exp(-cfg.root_center_bias * pop.users[i].theta * pop.users[i].theta);
    CategoricalTable author_table(author_weights);

    std::size_t next_tweet = 0;
    auto new_tweet_id = [&]() { return id_of("t", next_tweet++); };

    for (int k = 0; k < cfg.n_roots; ++k) {
        Rng rng = base.fork(kStreamForestBase + static_cast<std::uint64_t>(k));
        std::size_t author = author_table.draw(rng);
        double rho = pop.users[author].theta;
        std::int64_t ts = 1'000'000'000LL + static_cast<std::int64_t>(k) * 100'000;

        TweetId root_id = new_tweet_id();
        out.events.push_back({root_id, pop.users[author].id, ts, EventKind::original, std::nullopt});
        out.ledger.push_back({EventKind::original, root_id, pop.users[author].id, root_id, {}, 0});

        // Audience kernels over the whole population, author excluded.
        std::vector<double> w_retweet(pop.users.size()), w_quote(pop.users.size());
        for (std::size_t i = 0; i < pop.users.size(); ++i) {
            double d = pop.users[i].theta - rho;
            w_retweet[i] = std::exp(-d * d / (2.0 * cfg.sigma_r * cfg.sigma_r));
            w_quote[i] = std::exp(-d * d / (2.0 * cfg.sigma_q * cfg.sigma_q)) +
                         cfg.lambda_cross * std::abs(d);
        }
        w_retweet[author] = 0.0;
        w_quote[author] = 0.0;
        CategoricalTable retweet_table(w_retweet);
        CategoricalTable quote_table(w_quote);

        int n_retweets = rng.poisson(cfg.mean_retweets_per_root);
        for (int r = 0; r < n_retweets; ++r) {
            std::size_t u = retweet_table.draw(rng);
            TweetId id = new_tweet_id();
            out.events.push_back({id, pop.users[u].id, ++ts, EventKind::retweet, root_id});
            out.ledger.push_back({EventKind::retweet, id, pop.users[u].id, root_id, root_id, 0});
        }

        int n_quotes = rng.poisson(cfg.mean_quotes_per_root);
        for (int q = 0; q < n_quotes; ++q) {
            std::size_t quoter = quote_table.draw(rng);
            TweetId quote_id = new_tweet_id();
            out.events.push_back({quote_id, pop.users[quoter].id, ++ts, EventKind::quote, root_id});
            out.ledger.push_back({EventKind::quote, quote_id, pop.users[quoter].id, root_id, root_id, 1});

            // Chain continuation: each added node spawns a follow-up quote
            // with probability p_depth, placed around a target damped back
            // toward the grandparent valence.
            double parent_theta = pop.users[quoter].theta;
            double grandparent_theta = rho;
            std::size_t parent_user = quoter;
            TweetId parent_id = quote_id;
            int depth = 1;
            while (depth < kMaxChainDepth && rng.bernoulli(cfg.p_depth)) {
                double target = rng.normal(
                    parent_theta - cfg.kappa * (parent_theta - grandparent_theta),
                    cfg.depth2_noise_sd);
                std::size_t next_user = theta_index.nearest_excluding(target, parent_user);
                TweetId id = new_tweet_id();
                ++depth;
                out.events.push_back({id, pop.users[next_user].id, ++ts, EventKind::quote, parent_id});
                out.ledger.push_back({EventKind::quote, id, pop.users[next_user].id, root_id, parent_id, depth});
                grandparent_theta = parent_theta;
                parent_theta = pop.users[next_user].theta;
                parent_user = next_user;
                parent_id = id;
            }
        }
    }
    return out;
}

void write_truth_users_csv(const Population& pop, std::ostream& out) {
    out << "user_id,theta,beta\n";
    for (const auto& u : pop.users)
        out << u.id << ',' << format_fixed6(u.theta) << ',' << format_fixed6(u.beta) << '\n';
}

void write_truth_edges_csv(const SynthForest& forest, std::ostream& out) {
    out << "kind,tweet_id,user_id,root_id,parent_id,depth\n";
    for (const auto& e : forest.ledger)
        out << to_string(e.kind) << ',' << e.tweet_id << ',' << e.user_id << ','
            << e.root_id << ',' << e.parent_id << ',' << e.depth << '\n';
}

void write_elites_csv(const Population& pop, std::ostream& out) {
    out << "elite_id,phi\n";
    for (const auto& e : pop.elites) out << e.id << ',' << format_fixed6(e.phi) << '\n';
}

void write_follows_csv(const FollowMatrix& m, std::ostream& out) {
    out << "user_id,elite_id\n";
    for (std::size_t i = 0; i < m.n_users(); ++i)
        for (std::int32_t j : m.rows[i]) out << m.user_ids[i] << ',' << m.elite_ids[j] << '\n';
}

void write_user_stats_csv(const Population& pop, const SynthForest& forest, std::ostream& out) {
    std::map<UserId, std::int64_t> event_counts;
    for (const auto& e : forest.events) ++event_counts[e.user_id];
    out << "user_id,follower_count,tweet_count,lang_share\n";
    for (std::size_t i = 0; i < pop.users.size(); ++i) {
        auto it = event_counts.find(pop.users[i].id);
        std::int64_t tweets = it == event_counts.end() ? 0 : it->second;
        // Deterministic spread of follower counts so fixed-threshold
        // perimeters can keep everyone and median ones stay meaningful.
        std::int64_t followers = 50 + static_cast<std::int64_t>((i * 37) % 1000);
        out << pop.users[i].id << ',' << followers << ',' << tweets << ",1.000000\n";
    }
}

}  // namespace qf
