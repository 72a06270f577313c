#pragma once
// Anchored ideal-point estimation. Elites carry fixed valences phi; stage 1
// fits per-elite popularity intercepts from the follow matrix, stage 2 runs
// an independent MAP fit of (theta, beta) per user under the quadratic-
// distance logistic link eta_ij = alpha_j + beta_i - gamma (theta_i - phi_j)^2.

#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qf/types.hpp"

namespace qf {

struct EliteAnchor {
    UserId elite_id;
    double phi = 0.0;    // fixed, manually assigned valence
    double alpha = 0.0;  // fitted popularity intercept
};

// Sparse binary users x elites matrix; each row holds the sorted column
// indices of the elites the user follows.
struct FollowMatrix {
    std::vector<UserId> user_ids;
    std::vector<UserId> elite_ids;
    std::vector<std::vector<std::int32_t>> rows;

    std::size_t n_users() const { return user_ids.size(); }
    std::size_t n_elites() const { return elite_ids.size(); }
};

struct IdealPointEstimate {
    UserId user_id;
    double theta = 0.0;
    double beta = 0.0;
    int n_elites_followed = 0;
    bool converged = false;
    double neg_log_posterior = 0.0;
};

struct IpModelConfig {
    double gamma = 1.0;
    double prior_sd_theta = 1.0;
    double prior_sd_beta = 2.0;
    double prior_mean_theta = 0.0;
    int min_elites = 10;
    int max_iters = 200;
    // Gradient sup-norm at the optimum. Posterior curvature is O(n_elites),
    // so 1e-6 pins theta well below the 6-decimal output resolution.
    double tol = 1e-6;
};

// elite_id,phi rows; phi must be finite.
std::vector<EliteAnchor> parse_elites_csv(std::istream& in);

// user_id,elite_id edge list; every elite_id must resolve. Users are sorted.
FollowMatrix load_follow_edges(std::istream& in, std::span<const EliteAnchor> elites);

struct EliteInterceptFit {
    Eigen::VectorXd alpha;
    std::size_t zero_follower_elites = 0;
};

// Smoothed empirical log-odds alpha_j = logit((followers_j + 0.5)/(n_users + 1)).
EliteInterceptFit fit_elite_intercepts(const FollowMatrix& matrix);

// Per-user log posterior and its analytic gradient at (theta, beta); shared
// by the optimizer, the finite-difference checks and the grid oracle.
struct IpObjective {
    Eigen::VectorXd phi;    // fixed anchors
    Eigen::VectorXd alpha;  // fitted intercepts
    Eigen::VectorXd y;      // 0/1 follow indicators
    IpModelConfig cfg;

    double log_posterior(double theta, double beta) const;
    Eigen::Vector2d gradient(double theta, double beta) const;
    Eigen::Matrix2d hessian(double theta, double beta) const;
};

IpObjective make_objective(std::span<const std::int32_t> row,
                           std::span<const EliteAnchor> elites,
                           const IpModelConfig& cfg);

// Damped-Newton MAP with multi-starts theta0 in {m-2, m, m+2} around the
// prior mean; the best posterior wins. Throws when the user follows fewer
// than cfg.min_elites anchors.
IdealPointEstimate fit_user_ip(const UserId& user_id,
                               std::span<const std::int32_t> row,
                               std::span<const EliteAnchor> elites,
                               const IpModelConfig& cfg);

// Independent per-user fits over all rows meeting min_elites, merged in
// user-id order; n_threads <= 0 picks the hardware count.
std::vector<IdealPointEstimate> fit_all_users(const FollowMatrix& matrix,
                                              std::span<const EliteAnchor> elites,
                                              const IpModelConfig& cfg,
                                              int n_threads = 0);

enum class IpClass { left, center, right };
const char* to_string(IpClass c);

// left: theta < -1/3; center: -1/3 <= theta <= 1/3; right: theta > 1/3.
IpClass classify_ip(double theta);

struct IpReport {
    Eigen::VectorXd grid;      // fixed KDE grid
    Eigen::VectorXd kde_all;
    Eigen::VectorXd kde_roots;         // empty when < 2 root estimates
    std::vector<std::pair<double, double>> ecdf_all;    // (theta, F(theta))
    std::vector<std::pair<double, double>> ecdf_roots;
};

// Gaussian KDE (Silverman rule-of-thumb bandwidth) on [-3.5, 3.5] step 0.01
// plus exact ECDFs, for all estimates and for the root-user subset.
IpReport ip_report(std::span<const IdealPointEstimate> estimates,
                   const std::vector<UserId>& root_user_ids);

void write_ip_csv(std::span<const IdealPointEstimate> estimates, std::ostream& out);
std::map<UserId, double> read_ip_csv(std::istream& in);

}  // namespace qf
