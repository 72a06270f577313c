#include "qf/valence.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "qf/io_util.hpp"

namespace qf {

namespace {

double log1pexp(double x) {
    if (x > 35.0) return x;
    if (x < -35.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

std::vector<EliteAnchor> parse_elites_csv(std::istream& in) {
    std::vector<EliteAnchor> out;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_line(line);
        if (!header) {
            if (f != std::vector<std::string>{"elite_id", "phi"})
                throw std::runtime_error("elites csv: bad header");
            header = true;
            continue;
        }
        if (f.size() != 2) throw std::runtime_error("elites csv line " + std::to_string(lineno) + ": expected 2 fields");
        EliteAnchor e;
        e.elite_id = f[0];
        if (e.elite_id.empty()) throw std::runtime_error("elites csv line " + std::to_string(lineno) + ": empty elite_id");
        if (!parse_double(f[1], e.phi))
            throw std::runtime_error("elites csv line " + std::to_string(lineno) + ": non-finite phi");
        out.push_back(std::move(e));
    }
    if (!header) throw std::runtime_error("elites csv: missing header");
    std::sort(out.begin(), out.end(),
              [](const EliteAnchor& a, const EliteAnchor& b) { return a.elite_id < b.elite_id; });
    for (std::size_t i = 1; i < out.size(); ++i)
        if (out[i].elite_id == out[i - 1].elite_id)
            throw std::runtime_error("elites csv: duplicate elite_id " + out[i].elite_id);
    return out;
}

FollowMatrix load_follow_edges(std::istream& in, std::span<const EliteAnchor> elites) {
    std::unordered_map<UserId, std::int32_t> elite_index;
    for (std::size_t j = 0; j < elites.size(); ++j)
        elite_index.emplace(elites[j].elite_id, static_cast<std::int32_t>(j));

    std::map<UserId, std::vector<std::int32_t>> by_user;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_line(line);
        if (!header) {
            if (f != std::vector<std::string>{"user_id", "elite_id"})
                throw std::runtime_error("follows csv: bad header");
            header = true;
            continue;
        }
        if (f.size() != 2) throw std::runtime_error("follows csv line " + std::to_string(lineno) + ": expected 2 fields");
        auto it = elite_index.find(f[1]);
        if (it == elite_index.end())
            throw std::runtime_error("follows csv line " + std::to_string(lineno) + ": unknown elite_id " + f[1]);
        by_user[f[0]].push_back(it->second);
    }
    if (!header) throw std::runtime_error("follows csv: missing header");

    FollowMatrix m;
    m.elite_ids.reserve(elites.size());
    for (const auto& e : elites) m.elite_ids.push_back(e.elite_id);
    for (auto& [user, cols] : by_user) {
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        m.user_ids.push_back(user);
        m.rows.push_back(std::move(cols));
    }
    return m;
}

EliteInterceptFit fit_elite_intercepts(const FollowMatrix& matrix) {
    const auto n_users = static_cast<double>(matrix.n_users());
    Eigen::VectorXd followers = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(matrix.n_elites()));
    for (const auto& row : matrix.rows)
        for (std::int32_t j : row) followers[j] += 1.0;

    EliteInterceptFit fit;
    fit.alpha.resize(followers.size());
    for (Eigen::Index j = 0; j < followers.size(); ++j) {
        if (followers[j] == 0.0) ++fit.zero_follower_elites;
        double p = (followers[j] + 0.5) / (n_users + 1.0);
        fit.alpha[j] = std::log(p / (1.0 - p));
    }
    if (fit.zero_follower_elites > 0)
        std::cerr << "warning: " << fit.zero_follower_elites
                  << " elite(s) followed by no user; smoothed intercepts used\n";
    return fit;
}

double IpObjective::log_posterior(double theta, double beta) const {
    const double g = cfg.gamma;
    double ll = 0.0;
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
        double d = theta - phi[j];
        double eta = alpha[j] + beta - g * d * d;
        ll += y[j] * eta - log1pexp(eta);
    }
    double dt = theta - cfg.prior_mean_theta;
    ll -= dt * dt / (2.0 * cfg.prior_sd_theta * cfg.prior_sd_theta);
    ll -= beta * beta / (2.0 * cfg.prior_sd_beta * cfg.prior_sd_beta);
    return ll;
}

Eigen::Vector2d IpObjective::gradient(double theta, double beta) const {
    const double g = cfg.gamma;
    double g_theta = 0.0, g_beta = 0.0;
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
        double d = theta - phi[j];
        double eta = alpha[j] + beta - g * d * d;
        double r = y[j] - sigmoid(eta);
        g_theta += r * (-2.0 * g * d);
        g_beta += r;
    }
    g_theta -= (theta - cfg.prior_mean_theta) / (cfg.prior_sd_theta * cfg.prior_sd_theta);
    g_beta -= beta / (cfg.prior_sd_beta * cfg.prior_sd_beta);
    return {g_theta, g_beta};
}

Eigen::Matrix2d IpObjective::hessian(double theta, double beta) const {
    const double g = cfg.gamma;
    double h_tt = 0.0, h_tb = 0.0, h_bb = 0.0;
    for (Eigen::Index j = 0; j < phi.size(); ++j) {
        double d = theta - phi[j];
        double eta = alpha[j] + beta - g * d * d;
        double mu = sigmoid(eta);
        double w = mu * (1.0 - mu);
        double de = -2.0 * g * d;  // d(eta)/d(theta)
        h_tt += -w * de * de - 2.0 * g * (y[j] - mu);
        h_tb += -w * de;
        h_bb += -w;
    }
    h_tt -= 1.0 / (cfg.prior_sd_theta * cfg.prior_sd_theta);
    h_bb -= 1.0 / (cfg.prior_sd_beta * cfg.prior_sd_beta);
    Eigen::Matrix2d h;
    h << h_tt, h_tb, h_tb, h_bb;
    return h;
}

IpObjective make_objective(std::span<const std::int32_t> row,
                           std::span<const EliteAnchor> elites,
                           const IpModelConfig& cfg) {
    IpObjective obj;
    obj.cfg = cfg;
    const auto n = static_cast<Eigen::Index>(elites.size());
    obj.phi.resize(n);
    obj.alpha.resize(n);
    obj.y = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        obj.phi[j] = elites[j].phi;
        obj.alpha[j] = elites[j].alpha;
    }
    for (std::int32_t j : row) obj.y[j] = 1.0;
    return obj;
}

namespace {

struct NewtonResult {
    double theta = 0.0, beta = 0.0, lp = 0.0;
    bool converged = false;
};

NewtonResult damped_newton(const IpObjective& obj, double theta0, double beta0) {
    const auto& cfg = obj.cfg;
    double theta = theta0, beta = beta0;
    double lp = obj.log_posterior(theta, beta);
    bool converged = false;
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        Eigen::Vector2d grad = obj.gradient(theta, beta);
        if (grad.lpNorm<Eigen::Infinity>() < cfg.tol) {
            converged = true;
            break;
        }
        Eigen::Matrix2d hess = obj.hessian(theta, beta);
        Eigen::Vector2d step;
        // Newton direction if the Hessian is negative definite, otherwise a
        // plain ascent direction.
        double det = hess.determinant();
        if (hess(0, 0) < 0.0 && det > 0.0) {
            step = -hess.inverse() * grad;
        } else {
            step = grad;
        }
        double t = 1.0;
        bool improved = false;
        for (int halvings = 0; halvings < 40; ++halvings) {
            double cand_theta = theta + t * step[0];
            double cand_beta = beta + t * step[1];
            double cand_lp = obj.log_posterior(cand_theta, cand_beta);
            if (cand_lp > lp) {
                theta = cand_theta;
                beta = cand_beta;
                lp = cand_lp;
                improved = true;
                break;
            }
            t *= 0.5;
        }
        if (!improved) {
            converged = obj.gradient(theta, beta).lpNorm<Eigen::Infinity>() < cfg.tol;
            break;
        }
    }
    if (!converged)
        converged = obj.gradient(theta, beta).lpNorm<Eigen::Infinity>() < cfg.tol;
    return {theta, beta, lp, converged};
}

}  // namespace

IdealPointEstimate fit_user_ip(const UserId& user_id,
                               std::span<const std::int32_t> row,
                               std::span<const EliteAnchor> elites,
                               const IpModelConfig& cfg) {
    if (static_cast<int>(row.size()) < cfg.min_elites)
        throw std::invalid_argument("fit_user_ip: user " + user_id + " follows " +
                                    std::to_string(row.size()) + " elites, fewer than the required " +
                                    std::to_string(cfg.min_elites));
    IpObjective obj = make_objective(row, elites, cfg);

    // The posterior can be bimodal; start on both flanks and at the prior mean.
    NewtonResult best;
    bool first = true;
    for (double offset : {-2.0, 0.0, 2.0}) {
        NewtonResult r = damped_newton(obj, cfg.prior_mean_theta + offset, 0.0);
        if (first || r.lp > best.lp) {
            best = r;
            first = false;
        }
    }

    IdealPointEstimate est;
    est.user_id = user_id;
    est.theta = best.theta;
    est.beta = best.beta;
    est.n_elites_followed = static_cast<int>(row.size());
    est.converged = best.converged;
    est.neg_log_posterior = -best.lp;
    if (!std::isfinite(est.theta) || !std::isfinite(est.beta))
        throw std::runtime_error("fit_user_ip: non-finite estimate for user " + user_id);
    return est;
}

std::vector<IdealPointEstimate> fit_all_users(const FollowMatrix& matrix,
                                              std::span<const EliteAnchor> elites,
                                              const IpModelConfig& cfg,
                                              int n_threads) {
    std::vector<std::size_t> eligible;
    for (std::size_t i = 0; i < matrix.n_users(); ++i)
        if (static_cast<int>(matrix.rows[i].size()) >= cfg.min_elites) eligible.push_back(i);

    std::vector<IdealPointEstimate> out(eligible.size());
    if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    if (!eligible.empty())
        n_threads = std::min(n_threads, static_cast<int>(eligible.size()));

    auto worker = [&](std::size_t begin, std::size_t end) {
        for (std::size_t k = begin; k < end; ++k) {
            std::size_t i = eligible[k];
            out[k] = fit_user_ip(matrix.user_ids[i], matrix.rows[i], elites, cfg);
        }
    };
    if (n_threads == 1 || eligible.size() < 2) {
        worker(0, eligible.size());
    } else {
        std::vector<std::thread> threads;
        std::size_t chunk = (eligible.size() + n_threads - 1) / n_threads;
        for (int t = 0; t < n_threads; ++t) {
            std::size_t begin = t * chunk;
            std::size_t end = std::min(begin + chunk, eligible.size());
            if (begin >= end) break;
            threads.emplace_back(worker, begin, end);
        }
        for (auto& th : threads) th.join();
    }
    // matrix.user_ids is sorted, so `out` is already in user-id order.
    return out;
}

const char* to_string(IpClass c) {
    switch (c) {
        case IpClass::left: return "left";
        case IpClass::center: return "center";
        case IpClass::right: return "right";
    }
    return "?";
}

IpClass classify_ip(double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("classify_ip: non-finite theta");
    constexpr double kBand = 1.0 / 3.0;
    if (theta < -kBand) return IpClass::left;
    if (theta > kBand) return IpClass::right;
    return IpClass::center;
}

namespace {

// Silverman's rule of thumb: 0.9 min(sd, IQR/1.34) n^(-1/5).
double silverman_bandwidth(std::vector<double> xs) {
    const double n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (n - 1.0);
    double sd = std::sqrt(var);
    std::sort(xs.begin(), xs.end());
    auto quantile = [&](double p) {
        double h = (n - 1.0) * p;
        auto lo = static_cast<std::size_t>(h);
        double frac = h - static_cast<double>(lo);
        std::size_t hi = std::min(lo + 1, xs.size() - 1);
        return xs[lo] + frac * (xs[hi] - xs[lo]);
    };
    double iqr = quantile(0.75) - quantile(0.25);
    double spread = sd;
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    return 0.9 * spread * std::pow(n, -0.2);
}

Eigen::VectorXd gaussian_kde(const std::vector<double>& xs, const Eigen::VectorXd& grid) {
    double h = silverman_bandwidth(xs);
    if (!(h > 0.0)) throw std::invalid_argument("ip_report: degenerate sample, zero bandwidth");
    const double norm = 1.0 / (static_cast<double>(xs.size()) * h * std::sqrt(2.0 * M_PI));
    Eigen::VectorXd density = Eigen::VectorXd::Zero(grid.size());
    for (double x : xs)
        density += (-0.5 * ((grid.array() - x) / h).square()).exp().matrix();
    return density * norm;
}

std::vector<std::pair<double, double>> exact_ecdf(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        // Keep the last cumulative fraction for tied values.
        if (i + 1 < xs.size() && xs[i + 1] == xs[i]) continue;
        out.emplace_back(xs[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

}  // namespace

IpReport ip_report(std::span<const IdealPointEstimate> estimates,
                   const std::vector<UserId>& root_user_ids) {
    if (estimates.size() < 2) throw std::invalid_argument("ip_report: need >=2 points");

    std::vector<double> all;
    all.reserve(estimates.size());
    for (const auto& e : estimates) all.push_back(e.theta);

    std::unordered_set<UserId> roots(root_user_ids.begin(), root_user_ids.end());
    std::vector<double> root_thetas;
    for (const auto& e : estimates)
        if (roots.count(e.user_id)) root_thetas.push_back(e.theta);

    IpReport rep;
    const int n_grid = 701;  // [-3.5, 3.5] step 0.01
    rep.grid.resize(n_grid);
    for (int i = 0; i < n_grid; ++i) rep.grid[i] = -3.5 + 0.01 * i;

    rep.kde_all = gaussian_kde(all, rep.grid);
    rep.ecdf_all = exact_ecdf(all);
    if (root_thetas.size() >= 2) {
        rep.kde_roots = gaussian_kde(root_thetas, rep.grid);
        rep.ecdf_roots = exact_ecdf(root_thetas);
    }
    return rep;
}

void write_ip_csv(std::span<const IdealPointEstimate> estimates, std::ostream& out) {
    out << "user_id,theta,beta,n_elites,converged\n";
    for (const auto& e : estimates)
        out << e.user_id << ',' << format_fixed6(e.theta) << ',' << format_fixed6(e.beta)
            << ',' << e.n_elites_followed << ',' << (e.converged ? 1 : 0) << '\n';
}

std::map<UserId, double> read_ip_csv(std::istream& in) {
    std::map<UserId, double> out;
    std::string line;
    std::size_t lineno = 0;
    int theta_col = -1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_line(line);
        if (theta_col < 0) {
            // Header: any CSV carrying user_id and theta columns is accepted,
            // so truth files work interchangeably with fitted output.
            auto uid = std::find(f.begin(), f.end(), "user_id");
            auto th = std::find(f.begin(), f.end(), "theta");
            if (uid == f.end() || th == f.end() || uid != f.begin())
                throw std::runtime_error("ip csv: header must start with user_id and contain theta");
            theta_col = static_cast<int>(th - f.begin());
            continue;
        }
        if (static_cast<int>(f.size()) <= theta_col)
            throw std::runtime_error("ip csv line " + std::to_string(lineno) + ": too few fields");
        double theta = 0.0;
        if (!parse_double(f[theta_col], theta))
            throw std::runtime_error("ip csv line " + std::to_string(lineno) + ": non-finite theta");
        if (!out.emplace(f[0], theta).second)
            throw std::runtime_error("ip csv line " + std::to_string(lineno) + ": duplicate user " + f[0]);
    }
    if (theta_col < 0) throw std::runtime_error("ip csv: missing header");
    return out;
}

}  // namespace qf
