#pragma once
// Synthetic population, follow-matrix and quote/retweet forest generator.
// Users and elites carry ground-truth valences; follows are drawn from the
// same quadratic-distance logistic link the estimator fits, and forest
// events are drawn from distance kernels with a controllable cross-cutting
// boost and depth-2 damping, so every downstream sign effect is a
// construction parameter.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qf/rng.hpp"
#include "qf/types.hpp"
#include "qf/valence.hpp"

namespace qf {

struct MixtureSpec {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> sds;

    void validate() const;
    double mixture_mean() const;
    double mixture_variance() const;
    double sample(Rng& rng) const;
};

// Equal-weight normals at -1, 0, +1 with sd 0.3.
MixtureSpec default_mixture();

struct SynthConfig {
    std::uint64_t seed = 1;
    int n_users = 0;
    int n_elites = 0;
    int n_roots = 0;

    MixtureSpec user_theta = default_mixture();
    MixtureSpec elite_phi = default_mixture();

    double gamma = 1.0;
    double root_center_bias = 0.0;  // root-author weight exp(-bias * theta^2)
    double sigma_r = 0.8;           // retweet kernel scale
    double sigma_q = 0.8;           // quote kernel scale
    double lambda_cross = 0.0;      // cross-cutting boost on quote propensity
    double p_depth = 0.0;           // per-node chain continuation probability
    double kappa = 0.0;             // damping of secondary-quoter placement

    double mean_retweets_per_root = 20.0;
    double mean_quotes_per_root = 8.0;
    double alpha_mean = -0.5;  // elite popularity intercepts ~ N(alpha_mean, alpha_sd)
    double alpha_sd = 0.5;
    double beta_sd = 0.5;      // user activity intercepts ~ N(0, beta_sd)
    double depth2_noise_sd = 0.15;
    bool probit_link = false;  // misspecification mode for the follow link

    void validate() const;
};

// JSON object with the fields above; the core scalar fields are required
// and a missing one fails naming the field. Mixtures and event-count knobs
// are optional with the defaults shown.
SynthConfig parse_synth_config(const std::string& json_text);

struct SynthUser {
    UserId id;
    double theta = 0.0;
    double beta = 0.0;
};

struct SynthElite {
    UserId id;
    double phi = 0.0;
    double alpha = 0.0;
};

struct Population {
    std::vector<SynthUser> users;
    std::vector<SynthElite> elites;
};

Population gen_population(const SynthConfig& cfg);

// y_ij ~ Bernoulli(link(alpha_j + beta_i - gamma (theta_i - phi_j)^2)).
FollowMatrix gen_follow_matrix(const Population& pop, const SynthConfig& cfg);

// Expected matrix density under the same link, by quadrature; shared with
// the generator tests.
double follow_link(double eta, bool probit);

struct TruthEdge {
    EventKind kind = EventKind::original;  // original rows mark roots
    TweetId tweet_id;
    UserId user_id;
    TweetId root_id;
    TweetId parent_id;  // empty for roots
    int depth = 0;
};

struct SynthForest {
    std::vector<TweetEvent> events;
    std::vector<TruthEdge> ledger;
};

SynthForest gen_forest(const Population& pop, const SynthConfig& cfg);

void write_truth_users_csv(const Population& pop, std::ostream& out);
void write_truth_edges_csv(const SynthForest& forest, std::ostream& out);
void write_elites_csv(const Population& pop, std::ostream& out);
void write_follows_csv(const FollowMatrix& m, std::ostream& out);
// Synthetic perimeter statistics: every user active, varied follower counts.
void write_user_stats_csv(const Population& pop, const SynthForest& forest, std::ostream& out);

}  // namespace qf
