#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qf/rng.hpp"
#include "qf/valence.hpp"
#include "oracles.hpp"

using namespace qf;

namespace {

std::vector<EliteAnchor> make_anchors(const std::vector<std::pair<double, double>>& phi_alpha) {
    std::vector<EliteAnchor> elites;
    for (std::size_t j = 0; j < phi_alpha.size(); ++j)
        elites.push_back({"e" + std::to_string(j), phi_alpha[j].first, phi_alpha[j].second});
    return elites;
}

// Random anchored fixture plus a follow row drawn from the model itself.
struct Fixture {
    std::vector<EliteAnchor> elites;
    std::vector<std::int32_t> row;
};

Fixture random_fixture(Rng& rng, int n_elites, double theta, double beta, double gamma) {
    Fixture fx;
    for (int j = 0; j < n_elites; ++j) {
        double phi = -1.5 + 3.0 * rng.uniform01();
        double alpha = rng.normal(-0.3, 0.6);
        fx.elites.push_back({"e" + std::to_string(j), phi, alpha});
    }
    for (int j = 0; j < n_elites; ++j) {
        double d = theta - fx.elites[j].phi;
        double eta = fx.elites[j].alpha + beta - gamma * d * d;
        double p = 1.0 / (1.0 + std::exp(-eta));
        if (rng.bernoulli(p)) fx.row.push_back(j);
    }
    return fx;
}

}  // namespace

TEST_CASE("elite intercepts are smoothed empirical log-odds") {
    FollowMatrix m;
    m.elite_ids = {"e0", "e1", "e2"};
    // 9 users; e0 followed by all, e1 by none, e2 by some.
    for (int i = 0; i < 9; ++i) {
        m.user_ids.push_back("u" + std::to_string(i));
        std::vector<std::int32_t> row{0};
        if (i < 4) row.push_back(2);
        m.rows.push_back(row);
    }
    auto fit = fit_elite_intercepts(m);
    CHECK(fit.alpha[0] == doctest::Approx(2.9444389791664403).epsilon(1e-12));
    CHECK(fit.alpha[1] == doctest::Approx(-2.9444389791664407).epsilon(1e-12));
    CHECK(fit.zero_follower_elites == 1);

    SUBCASE("an elite followed by half the users sits at zero") {
        FollowMatrix half;
        half.elite_ids = {"e0"};
        for (int i = 0; i < 10; ++i) {
            half.user_ids.push_back("u" + std::to_string(i));
            half.rows.push_back(i < 5 ? std::vector<std::int32_t>{0} : std::vector<std::int32_t>{});
        }
        auto f = fit_elite_intercepts(half);
        // p = 5.5 / 11 = 0.5 exactly.
        CHECK(f.alpha[0] == doctest::Approx(0.0).epsilon(1e-15));
    }
}

TEST_CASE("log posterior matches hand-computed values") {
    IpModelConfig cfg;  // gamma 1, prior sds 1 and 2
    SUBCASE("single followed elite") {
        auto elites = make_anchors({{1.0, 0.5}});
        std::vector<std::int32_t> row{0};
        auto obj = make_objective(row, elites, cfg);
        CHECK(obj.log_posterior(0.5, 0.2) == doctest::Approx(-0.623248945997455).epsilon(1e-12));
    }
    SUBCASE("one followed, one not") {
        auto elites = make_anchors({{-1.0, 0.3}, {1.0, -0.2}});
        std::vector<std::int32_t> row{1};
        auto obj = make_objective(row, elites, cfg);
        CHECK(obj.log_posterior(-0.4, 0.1) == doctest::Approx(-2.9745591338623822).epsilon(1e-12));
    }
}

TEST_CASE("analytic gradient matches central differences") {
    Rng rng(424242);
    IpModelConfig cfg;
    const double h = 1e-5;
    int checked = 0;
    while (checked < 100) {
        auto fx = random_fixture(rng, 40, rng.normal(0.0, 1.0), rng.normal(0.0, 0.5), 1.0);
        auto obj = make_objective(fx.row, fx.elites, cfg);
        double theta = rng.normal(0.0, 1.5);
        double beta = rng.normal(0.0, 1.0);
        Eigen::Vector2d g = obj.gradient(theta, beta);
        double num_t = (obj.log_posterior(theta + h, beta) - obj.log_posterior(theta - h, beta)) / (2 * h);
        double num_b = (obj.log_posterior(theta, beta + h) - obj.log_posterior(theta, beta - h)) / (2 * h);
        CHECK(std::abs(g[0] - num_t) <= 1e-5 * std::max(1.0, std::abs(num_t)));
        CHECK(std::abs(g[1] - num_b) <= 1e-5 * std::max(1.0, std::abs(num_b)));
        ++checked;
    }
}

TEST_CASE("hessian matches finite differences of the gradient") {
    Rng rng(11);
    IpModelConfig cfg;
    const double h = 1e-6;
    for (int rep = 0; rep < 20; ++rep) {
        auto fx = random_fixture(rng, 25, 0.5, 0.0, 1.0);
        auto obj = make_objective(fx.row, fx.elites, cfg);
        double theta = rng.normal(0.0, 1.0), beta = rng.normal(0.0, 0.5);
        Eigen::Matrix2d H = obj.hessian(theta, beta);
        Eigen::Vector2d gt = (obj.gradient(theta + h, beta) - obj.gradient(theta - h, beta)) / (2 * h);
        Eigen::Vector2d gb = (obj.gradient(theta, beta + h) - obj.gradient(theta, beta - h)) / (2 * h);
        CHECK(H(0, 0) == doctest::Approx(gt[0]).epsilon(1e-4));
        CHECK(H(1, 0) == doctest::Approx(gt[1]).epsilon(1e-4));
        CHECK(H(0, 1) == doctest::Approx(gb[0]).epsilon(1e-4));
        CHECK(H(1, 1) == doctest::Approx(gb[1]).epsilon(1e-4));
    }
}

TEST_CASE("classification bands") {
    CHECK(classify_ip(-1.0) == IpClass::left);
    CHECK(classify_ip(0.0) == IpClass::center);
    CHECK(classify_ip(1.0) == IpClass::right);
    // Boundaries are center-inclusive.
    CHECK(classify_ip(-1.0 / 3.0) == IpClass::center);
    CHECK(classify_ip(1.0 / 3.0) == IpClass::center);
    CHECK(classify_ip(std::nextafter(1.0 / 3.0, 2.0)) == IpClass::right);
    CHECK(classify_ip(std::nextafter(-1.0 / 3.0, -2.0)) == IpClass::left);
    CHECK_THROWS(classify_ip(std::nan("")));

    SUBCASE("every finite theta lands in exactly one class") {
        Rng rng(3);
        for (int i = 0; i < 500; ++i) {
            double theta = rng.normal(0.0, 2.0);
            int hits = 0;
            hits += classify_ip(theta) == IpClass::left ? 1 : 0;
            hits += classify_ip(theta) == IpClass::center ? 1 : 0;
            hits += classify_ip(theta) == IpClass::right ? 1 : 0;
            CHECK(hits == 1);
        }
    }
}

TEST_CASE("users below the elite floor are refused") {
    auto elites = make_anchors({{-1, 0}, {0, 0}, {1, 0}, {2, 0}, {0.5, 0}, {-0.5, 0},
                                {1.5, 0}, {-1.5, 0}, {0.2, 0}, {-0.2, 0}});
    std::vector<std::int32_t> nine{0, 1, 2, 3, 4, 5, 6, 7, 8};
    IpModelConfig cfg;
    CHECK_THROWS_AS(fit_user_ip("u", nine, elites, cfg), std::invalid_argument);
    std::vector<std::int32_t> ten{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    CHECK_NOTHROW(fit_user_ip("u", ten, elites, cfg));
}

TEST_CASE("following only positive anchors pulls theta positive") {
    // Symmetric anchors at -1 and +1 with equal intercepts; the user follows
    // every positive elite and no negative one.
    std::vector<std::pair<double, double>> spec;
    for (int k = 0; k < 10; ++k) spec.push_back({1.0, -0.5});
    for (int k = 0; k < 10; ++k) spec.push_back({-1.0, -0.5});
    auto elites = make_anchors(spec);
    std::vector<std::int32_t> row;
    for (int k = 0; k < 10; ++k) row.push_back(k);
    auto est = fit_user_ip("u", row, elites, {});
    CHECK(est.theta > 0.0);
    CHECK(est.converged);
    CHECK(est.n_elites_followed == 10);
}

TEST_CASE("hitting the iteration cap reports non-convergence") {
    Rng rng(41);
    auto fx = random_fixture(rng, 60, 0.9, 0.0, 1.0);
    REQUIRE(static_cast<int>(fx.row.size()) >= 10);
    IpModelConfig strangled;
    strangled.max_iters = 1;
    auto est = fit_user_ip("u", fx.row, fx.elites, strangled);
    CHECK_FALSE(est.converged);
    CHECK(std::isfinite(est.theta));  // the estimate is still returned

    IpModelConfig normal;
    CHECK(fit_user_ip("u", fx.row, fx.elites, normal).converged);
}

TEST_CASE("newton fit agrees with the profiled grid oracle") {
    Rng rng(808);
    IpModelConfig cfg;
    for (int rep = 0; rep < 8; ++rep) {
        auto fx = random_fixture(rng, 200, 0.8, 0.0, cfg.gamma);
        if (static_cast<int>(fx.row.size()) < cfg.min_elites) continue;
        auto est = fit_user_ip("u", fx.row, fx.elites, cfg);
        auto obj = make_objective(fx.row, fx.elites, cfg);
        double grid = oracle::grid_search_theta(obj, -4.0, 4.0, 0.001);
        CHECK(std::abs(est.theta - grid) <= 0.15);
    }
}

TEST_CASE("joint translation of anchors and prior shifts theta") {
    Rng rng(909);
    const double c = 0.7;
    for (int rep = 0; rep < 10; ++rep) {
        auto fx = random_fixture(rng, 60, 0.3, 0.1, 1.0);
        if (static_cast<int>(fx.row.size()) < 10) continue;
        IpModelConfig cfg;
        auto base = fit_user_ip("u", fx.row, fx.elites, cfg);

        auto shifted = fx.elites;
        for (auto& e : shifted) e.phi += c;
        IpModelConfig shifted_cfg = cfg;
        shifted_cfg.prior_mean_theta = c;
        auto moved = fit_user_ip("u", fx.row, shifted, shifted_cfg);

        CHECK(moved.theta == doctest::Approx(base.theta + c).epsilon(1e-6));
        CHECK(moved.beta == doctest::Approx(base.beta).epsilon(1e-6));
    }
}

TEST_CASE("adding a followed far-right elite never lowers theta") {
    Rng rng(616);
    int tested = 0;
    for (int rep = 0; rep < 30 && tested < 20; ++rep) {
        auto fx = random_fixture(rng, 50, rng.normal(0.0, 0.8), 0.0, 1.0);
        // Guarantee a phi = +2 elite exists and is not followed yet.
        fx.elites.push_back({"far_right", 2.0, 0.0});
        auto far_index = static_cast<std::int32_t>(fx.elites.size() - 1);
        if (static_cast<int>(fx.row.size()) < 10) continue;
        ++tested;

        auto before = fit_user_ip("u", fx.row, fx.elites, {});
        auto row_after = fx.row;
        row_after.push_back(far_index);
        auto after = fit_user_ip("u", row_after, fx.elites, {});
        CHECK(after.theta >= before.theta - 1e-6);
    }
    CHECK(tested >= 10);
}

TEST_CASE("ip report densities and distributions") {
    std::vector<IdealPointEstimate> ests;
    Rng rng(99);
    for (int i = 0; i < 400; ++i) {
        IdealPointEstimate e;
        e.user_id = "u" + std::to_string(i);
        // Draws within the grid range so the density mass is captured.
        do {
            e.theta = rng.normal(0.0, 1.0);
        } while (std::abs(e.theta) > 2.8);
        ests.push_back(e);
    }
    std::vector<UserId> roots;
    for (int i = 0; i < 100; ++i) roots.push_back("u" + std::to_string(i));

    auto report = ip_report(ests, roots);
    CHECK(report.grid.size() == 701);
    CHECK(report.grid[0] == doctest::Approx(-3.5));
    CHECK(report.grid[700] == doctest::Approx(3.5));

    SUBCASE("KDE integrates to one") {
        CHECK(oracle::trapezoid(report.grid, report.kde_all) == doctest::Approx(1.0).epsilon(1e-3));
        CHECK(oracle::trapezoid(report.grid, report.kde_roots) == doctest::Approx(1.0).epsilon(1e-3));
    }
    SUBCASE("ECDF is exact and ends at one") {
        CHECK(report.ecdf_all.back().second == 1.0);
        CHECK(report.ecdf_roots.back().second == 1.0);
        double max_theta = -10.0;
        for (const auto& e : ests) max_theta = std::max(max_theta, e.theta);
        CHECK(report.ecdf_all.back().first == doctest::Approx(max_theta));
        for (std::size_t i = 1; i < report.ecdf_all.size(); ++i) {
            CHECK(report.ecdf_all[i].first > report.ecdf_all[i - 1].first);
            CHECK(report.ecdf_all[i].second > report.ecdf_all[i - 1].second);
        }
    }
    SUBCASE("degenerate input is rejected") {
        std::vector<IdealPointEstimate> one{ests[0]};
        CHECK_THROWS(ip_report(one, {}));
    }
}

TEST_CASE("csv round trips and elite loading") {
    auto elites_text = "elite_id,phi\ne0,-1.0\ne1,0.25\n";
    std::istringstream ein(elites_text);
    auto elites = parse_elites_csv(ein);
    REQUIRE(elites.size() == 2);
    CHECK(elites[1].phi == doctest::Approx(0.25));

    SUBCASE("unknown elite in the edge list fails") {
        std::istringstream fin("user_id,elite_id\nu1,e9\n");
        CHECK_THROWS(load_follow_edges(fin, elites));
    }
    SUBCASE("edges load into sorted sparse rows") {
        std::istringstream fin("user_id,elite_id\nu2,e1\nu1,e0\nu2,e0\nu2,e0\n");
        auto m = load_follow_edges(fin, elites);
        REQUIRE(m.n_users() == 2);
        CHECK(m.user_ids == std::vector<UserId>{"u1", "u2"});
        CHECK(m.rows[0] == std::vector<std::int32_t>{0});
        CHECK(m.rows[1] == std::vector<std::int32_t>{0, 1});  // duplicate edge collapsed
    }
    SUBCASE("non-finite phi rejected") {
        std::istringstream bad("elite_id,phi\ne0,nan\n");
        CHECK_THROWS(parse_elites_csv(bad));
    }
    SUBCASE("ip csv round trip") {
        std::vector<IdealPointEstimate> ests;
        IdealPointEstimate e;
        e.user_id = "u1";
        e.theta = -0.123456789;
        e.beta = 0.5;
        e.n_elites_followed = 12;
        e.converged = true;
        ests.push_back(e);
        std::ostringstream out;
        write_ip_csv(ests, out);
        std::istringstream in(out.str());
        auto map = read_ip_csv(in);
        REQUIRE(map.size() == 1);
        CHECK(map.at("u1") == doctest::Approx(-0.123457).epsilon(1e-9));  // 6-decimal file
    }
    SUBCASE("truth csv headers load as ip maps") {
        std::istringstream in("user_id,theta,beta\nu1,0.500000,0.100000\n");
        auto map = read_ip_csv(in);
        CHECK(map.at("u1") == doctest::Approx(0.5));
    }
}

TEST_CASE("batch fitting is deterministic across thread counts") {
    Rng rng(5005);
    FollowMatrix m;
    int n_elites = 40;
    std::vector<EliteAnchor> elites;
    for (int j = 0; j < n_elites; ++j)
        elites.push_back({"e" + std::to_string(j), -1.5 + 3.0 * (j / double(n_elites - 1)), 0.0});
    for (const auto& e : elites) m.elite_ids.push_back(e.elite_id);
    for (int i = 0; i < 60; ++i) {
        double theta = rng.normal(0.0, 1.0);
        std::vector<std::int32_t> row;
        for (int j = 0; j < n_elites; ++j) {
            double d = theta - elites[j].phi;
            if (rng.bernoulli(1.0 / (1.0 + std::exp(d * d - 0.5)))) row.push_back(j);
        }
        m.user_ids.push_back("u" + std::to_string(100 + i));
        m.rows.push_back(std::move(row));
    }
    auto alpha = fit_elite_intercepts(m);
    for (int j = 0; j < n_elites; ++j) elites[j].alpha = alpha.alpha[j];

    IpModelConfig cfg;
    cfg.min_elites = 5;
    auto one = fit_all_users(m, elites, cfg, 1);
    auto four = fit_all_users(m, elites, cfg, 4);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        CHECK(one[i].user_id == four[i].user_id);
        CHECK(one[i].theta == four[i].theta);  // bitwise identical
        CHECK(one[i].beta == four[i].beta);
    }
    // Sorted by user id, and only rows meeting the floor.
    for (std::size_t i = 1; i < one.size(); ++i) CHECK(one[i - 1].user_id < one[i].user_id);
    for (const auto& est : one) CHECK(est.n_elites_followed >= cfg.min_elites);
}
