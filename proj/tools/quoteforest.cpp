// quoteforest: staged pipeline over quote-cascade event streams.
//
// Subcommands:
//   synth    generate a synthetic population, follow matrix and event stream
//   trees    build the quote forest and chain statistics from events
//   ip       fit anchored ideal points from the follow matrix
//   metrics  compute all figure-backing CSVs and DOT exports
//
// Every command is a pure function of (inputs, flags, seed); reruns are
// byte-identical at any thread count. Exit codes: 0 success, 1 usage error,
// 2 data error.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qf/chains.hpp"
#include "qf/forest.hpp"
#include "qf/forest_io.hpp"
#include "qf/ingest.hpp"
#include "qf/io_util.hpp"
#include "qf/manifest.hpp"
#include "qf/metrics.hpp"
#include "qf/synth.hpp"
#include "qf/valence.hpp"

namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GlobalOpts {
    int threads = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
};

fs::path ensure_out_dir(const GlobalOpts& g) {
    if (g.out.empty()) throw UsageError("--out is required");
    fs::path dir(g.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw std::runtime_error("cannot create output directory: " + dir.string());
    return dir;
}

void write_file(const fs::path& path, const std::string& content) {
    qf::write_text_file(path, content);
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open input file: " + path.string());
    return in;
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

struct SynthArgs {
    std::string config_path;
};

int run_synth(const GlobalOpts& g, const SynthArgs& a) {
    fs::path out_dir = ensure_out_dir(g);
    qf::SynthConfig cfg = qf::parse_synth_config(qf::read_text_file(a.config_path));
    if (g.seed) cfg.seed = *g.seed;

    qf::Population pop = qf::gen_population(cfg);
    qf::FollowMatrix follows = qf::gen_follow_matrix(pop, cfg);
    qf::SynthForest forest = qf::gen_forest(pop, cfg);

    {
        std::ostringstream events;
        qf::serialize_events(forest.events, events);
        write_file(out_dir / "events.ndjson", events.str());
    }
    auto write_csv = [&](const char* name, auto&& writer) {
        std::ostringstream ss;
        writer(ss);
        write_file(out_dir / name, ss.str());
    };
    write_csv("truth_users.csv", [&](std::ostream& o) { qf::write_truth_users_csv(pop, o); });
    write_csv("truth_edges.csv", [&](std::ostream& o) { qf::write_truth_edges_csv(forest, o); });
    write_csv("elites.csv", [&](std::ostream& o) { qf::write_elites_csv(pop, o); });
    write_csv("follows.csv", [&](std::ostream& o) { qf::write_follows_csv(follows, o); });
    write_csv("user_stats.csv", [&](std::ostream& o) { qf::write_user_stats_csv(pop, forest, o); });

    std::size_t n_edges = 0;
    for (const auto& row : follows.rows) n_edges += row.size();

    qf::RunManifest m;
    m.command = "synth";
    m.add_input("config", a.config_path);
    m.flags["seed"] = std::to_string(cfg.seed);
    m.row_counts["users"] = static_cast<std::int64_t>(pop.users.size());
    m.row_counts["elites"] = static_cast<std::int64_t>(pop.elites.size());
    m.row_counts["follow_edges"] = static_cast<std::int64_t>(n_edges);
    m.row_counts["events"] = static_cast<std::int64_t>(forest.events.size());
    m.row_counts["ledger_rows"] = static_cast<std::int64_t>(forest.ledger.size());
    qf::write_manifest(m, out_dir);

    std::cerr << "synth: " << pop.users.size() << " users, " << forest.events.size()
              << " events -> " << out_dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// trees
// ---------------------------------------------------------------------------

struct TreesArgs {
    std::string events_path;
    std::string user_stats_path;
    std::int64_t min_tweets = 5;
    double min_lang_share = 0.15;
    std::string follower_threshold = "median";
    std::int64_t t0 = std::numeric_limits<std::int64_t>::min();
    std::int64_t t1 = std::numeric_limits<std::int64_t>::max();
    std::vector<double> coverage_q = {0.75, 0.90};
    std::vector<int> pingpong_w = {3, 5};
    bool lenient = false;
};

int run_trees(const GlobalOpts& g, const TreesArgs& a) {
    fs::path out_dir = ensure_out_dir(g);

    qf::PerimeterConfig pcfg;
    pcfg.min_tweets = a.min_tweets;
    pcfg.min_lang_share = a.min_lang_share;
    if (a.follower_threshold != "median") {
        std::int64_t v = 0;
        if (!qf::parse_i64(a.follower_threshold, v))
            throw UsageError("--follower-threshold must be \"median\" or an integer");
        pcfg.fixed_follower_threshold = v;
    }

    auto events_in = open_input(a.events_path);
    qf::ParseResult parsed = qf::parse_events(events_in, {.lenient = a.lenient});
    auto stats_in = open_input(a.user_stats_path);
    auto stats = qf::parse_user_stats(stats_in);
    auto perimeter = qf::apply_perimeter(stats, pcfg);

    if (parsed.events.empty())
        std::cerr << "warning: no events in " << a.events_path << "; emitting an empty forest\n";

    qf::Forest forest = qf::build_forest(parsed.events, perimeter, a.t0, a.t1);

    auto write_csv = [&](const char* name, auto&& writer) {
        std::ostringstream ss;
        writer(ss);
        write_file(out_dir / name, ss.str());
    };
    write_csv("forest.csv", [&](std::ostream& o) { qf::write_forest_csv(forest, o); });
    write_csv("retweeters.csv", [&](std::ostream& o) { qf::write_retweeters_csv(forest, o); });
    write_csv("trees_per_user.csv", [&](std::ostream& o) {
        qf::write_trees_per_user_csv(qf::trees_per_user(forest), o);
    });

    std::vector<std::size_t> cutoffs;
    if (!forest.trees.empty()) cutoffs = qf::size_coverage_thresholds(forest, a.coverage_q);
    write_csv("coverage.csv", [&](std::ostream& o) {
        qf::write_coverage_csv(a.coverage_q, cutoffs, o);
    });

    auto census_paths = qf::chain_census(forest, qf::CensusMode::paths);
    auto census_nodes = qf::chain_census(forest, qf::CensusMode::nodes);
    write_csv("census.csv", [&](std::ostream& o) {
        qf::write_census_csv(census_paths, census_nodes, o);
    });

    std::vector<std::pair<int, std::map<std::pair<int, int>, std::size_t>>> pingpong;
    for (int w : a.pingpong_w) {
        if (w < 2) throw UsageError("--pingpong-w values must be >= 2");
        pingpong.emplace_back(w, qf::pingpong_histogram(forest, w));
    }
    write_csv("pingpong.csv", [&](std::ostream& o) { qf::write_pingpong_csv(pingpong, o); });

    std::size_t total_nodes = 0;
    for (const auto& t : forest.trees) total_nodes += t.size();

    qf::RunManifest m;
    m.command = "trees";
    m.add_input("events", a.events_path);
    m.add_input("user_stats", a.user_stats_path);
    m.flags["min_tweets"] = std::to_string(a.min_tweets);
    m.flags["min_lang_share"] = qf::format_fixed6(a.min_lang_share);
    m.flags["follower_threshold"] = a.follower_threshold;
    m.flags["lenient"] = a.lenient ? "1" : "0";
    m.row_counts["events"] = static_cast<std::int64_t>(parsed.events.size());
    m.row_counts["perimeter_users"] = static_cast<std::int64_t>(perimeter.size());
    m.row_counts["trees"] = static_cast<std::int64_t>(forest.trees.size());
    m.row_counts["tree_nodes"] = static_cast<std::int64_t>(total_nodes);
    m.diagnostics["blank_lines"] = static_cast<std::int64_t>(parsed.blank_lines);
    m.diagnostics["malformed_skipped"] = static_cast<std::int64_t>(parsed.malformed_skipped);
    m.diagnostics["dropped_self_quote_edges"] = static_cast<std::int64_t>(forest.diag.dropped_self_quote_edges);
    m.diagnostics["dropped_non_perimeter_edges"] = static_cast<std::int64_t>(forest.diag.dropped_non_perimeter_edges);
    m.diagnostics["discarded_quoteless_roots"] = static_cast<std::int64_t>(forest.diag.discarded_quoteless_roots);
    m.diagnostics["dangling_retweets"] = static_cast<std::int64_t>(forest.diag.dangling_retweets);
    m.diagnostics["retweets_of_non_roots"] = static_cast<std::int64_t>(forest.diag.retweets_of_non_roots);
    m.diagnostics["refs_to_retweet_events"] = static_cast<std::int64_t>(forest.diag.refs_to_retweet_events);
    qf::write_manifest(m, out_dir);

    std::cerr << "trees: " << forest.trees.size() << " trees, " << total_nodes
              << " nodes -> " << out_dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// ip
// ---------------------------------------------------------------------------

struct IpArgs {
    std::string follows_path;
    std::string elites_path;
    std::string roots_path;  // optional: one user id per line for the fig3 roots series
    std::string truth_path;  // optional: user_id,theta csv for recovery diagnostics
    qf::IpModelConfig cfg;
};

int run_ip(const GlobalOpts& g, const IpArgs& a) {
    fs::path out_dir = ensure_out_dir(g);

    auto elites_in = open_input(a.elites_path);
    auto elites = qf::parse_elites_csv(elites_in);
    auto follows_in = open_input(a.follows_path);
    auto matrix = qf::load_follow_edges(follows_in, elites);

    auto intercepts = qf::fit_elite_intercepts(matrix);
    for (std::size_t j = 0; j < elites.size(); ++j)
        elites[j].alpha = intercepts.alpha[static_cast<Eigen::Index>(j)];

    auto estimates = qf::fit_all_users(matrix, elites, a.cfg, g.threads);

    {
        std::ostringstream ss;
        qf::write_ip_csv(estimates, ss);
        write_file(out_dir / "ip.csv", ss.str());
    }

    std::vector<qf::UserId> roots;
    if (!a.roots_path.empty()) {
        auto roots_in = open_input(a.roots_path);
        std::string line;
        while (std::getline(roots_in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) roots.push_back(line);
        }
    }
    if (estimates.size() >= 2) {
        auto report = qf::ip_report(estimates, roots);
        std::ostringstream ss;
        qf::write_fig3_csv(report, ss);
        write_file(out_dir / "fig3_ipdist.csv", ss.str());
    } else {
        std::cerr << "warning: fewer than 2 estimates; fig3_ipdist.csv skipped\n";
    }

    std::int64_t converged = 0;
    for (const auto& e : estimates) converged += e.converged ? 1 : 0;

    qf::RunManifest m;
    m.command = "ip";
    m.add_input("follows", a.follows_path);
    m.add_input("elites", a.elites_path);
    if (!a.roots_path.empty()) m.add_input("roots", a.roots_path);
    if (!a.truth_path.empty()) {
        auto truth_in = open_input(a.truth_path);
        auto truth = qf::read_ip_csv(truth_in);
        double sum_e = 0, sum_t = 0;
        std::vector<std::pair<double, double>> pairs;
        for (const auto& e : estimates) {
            auto it = truth.find(e.user_id);
            if (it == truth.end()) continue;
            pairs.emplace_back(e.theta, it->second);
            sum_e += e.theta;
            sum_t += it->second;
        }
        if (pairs.size() >= 2) {
            double me = sum_e / pairs.size(), mt = sum_t / pairs.size();
            double see = 0, stt = 0, set = 0;
            for (const auto& [e, t] : pairs) {
                see += (e - me) * (e - me);
                stt += (t - mt) * (t - mt);
                set += (e - me) * (t - mt);
            }
            m.add_input("truth", a.truth_path);
            m.stats["recovery_correlation"] = qf::format_fixed6(set / std::sqrt(see * stt));
            m.row_counts["truth_matched"] = static_cast<std::int64_t>(pairs.size());
        } else {
            std::cerr << "warning: fewer than 2 truth matches; recovery correlation skipped\n";
        }
    }
    m.flags["gamma"] = qf::format_fixed6(a.cfg.gamma);
    m.flags["min_elites"] = std::to_string(a.cfg.min_elites);
    m.flags["prior_sd_theta"] = qf::format_fixed6(a.cfg.prior_sd_theta);
    m.flags["prior_sd_beta"] = qf::format_fixed6(a.cfg.prior_sd_beta);
    m.row_counts["users_total"] = static_cast<std::int64_t>(matrix.n_users());
    m.row_counts["elites"] = static_cast<std::int64_t>(matrix.n_elites());
    m.row_counts["users_fitted"] = static_cast<std::int64_t>(estimates.size());
    m.diagnostics["users_below_min_elites"] =
        static_cast<std::int64_t>(matrix.n_users() - estimates.size());
    m.diagnostics["non_converged"] = static_cast<std::int64_t>(estimates.size()) - converged;
    m.diagnostics["zero_follower_elites"] = static_cast<std::int64_t>(intercepts.zero_follower_elites);
    qf::write_manifest(m, out_dir);

    std::cerr << "ip: fitted " << estimates.size() << " of " << matrix.n_users()
              << " users -> " << out_dir.string() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// metrics
// ---------------------------------------------------------------------------

struct MetricsArgs {
    std::string forest_dir;
    std::string ip_path;
    std::string annotations_path;
    double bin_lo = -2.5;
    double bin_hi = 2.5;
    double bin_width = 0.25;
    std::vector<double> coverage_q = {0.75, 0.90};
    bool event_weighted_quoters = false;
    int dot_count = 3;
};

int run_metrics(const GlobalOpts& g, const MetricsArgs& a) {
    fs::path out_dir = ensure_out_dir(g);
    fs::path forest_csv = fs::path(a.forest_dir) / "forest.csv";
    fs::path retweeters_csv = fs::path(a.forest_dir) / "retweeters.csv";
    if (!fs::exists(forest_csv))
        throw std::runtime_error("missing input: " + forest_csv.string());
    if (!fs::exists(retweeters_csv))
        throw std::runtime_error("missing input: " + retweeters_csv.string());

    auto forest_in = open_input(forest_csv);
    auto retweeters_in = open_input(retweeters_csv);
    qf::Forest forest = qf::read_forest_csv(forest_in, retweeters_in);
    auto ip_in = open_input(a.ip_path);
    qf::IpMap ip = qf::read_ip_csv(ip_in);

    if (a.coverage_q.size() != 2)
        throw UsageError("--coverage-q needs exactly two quantiles");
    std::size_t c1 = 2, c2 = 2;
    if (!forest.trees.empty()) {
        auto cutoffs = qf::size_coverage_thresholds(forest, a.coverage_q);
        c1 = cutoffs[0];
        c2 = cutoffs[1];
    } else {
        std::cerr << "warning: empty forest; figure CSVs will carry no rows\n";
    }

    qf::BinSpec bins{a.bin_lo, a.bin_hi, a.bin_width};
    bins.validate();

    auto summaries = qf::summarize_trees(forest, ip, c1, c2, !a.event_weighted_quoters);

    auto write_csv = [&](const char* name, auto&& writer) {
        std::ostringstream ss;
        writer(ss);
        write_file(out_dir / name, ss.str());
    };

    write_csv("fig5_qr.csv", [&](std::ostream& o) {
        qf::write_fig5_csv(qf::qr_curves(summaries, bins), o);
    });
    {
        std::vector<qf::DivergenceCurves> curves;
        for (auto kind : {qf::DivergenceX::rho, qf::DivergenceX::mean_r, qf::DivergenceX::offset})
            curves.push_back(qf::divergence_curves(summaries, kind, bins));
        write_csv("fig6_divergence.csv", [&](std::ostream& o) { qf::write_fig6_csv(curves, o); });
    }
    auto user_curves = qf::user_summaries(forest, ip, bins);
    write_csv("fig7_users.csv", [&](std::ostream& o) { qf::write_fig7_csv(user_curves, o); });
    write_csv("user_summaries.csv", [&](std::ostream& o) {
        qf::write_user_summaries_csv(user_curves.users, o);
    });
    auto d2 = qf::depth2_curve(forest, ip, bins, c1, c2);
    write_csv("fig8_depth2.csv", [&](std::ostream& o) { qf::write_fig8_csv(d2, o); });
    auto heat = qf::heatmaps(summaries, {}, bins);
    write_csv("fig4_heatmap.csv", [&](std::ostream& o) { qf::write_fig4_heatmap_csv(heat, o); });
    write_csv("fig4_rhodist.csv", [&](std::ostream& o) { qf::write_fig4_rhodist_csv(heat, o); });

    // Fig 3 from the IP table, roots series over the forest's root authors.
    if (ip.size() >= 2) {
        std::vector<qf::IdealPointEstimate> pseudo;
        pseudo.reserve(ip.size());
        for (const auto& [user, theta] : ip) {
            qf::IdealPointEstimate e;
            e.user_id = user;
            e.theta = theta;
            pseudo.push_back(std::move(e));
        }
        std::vector<qf::UserId> roots;
        for (const auto& t : forest.trees) roots.push_back(t.root().user_id);
        auto report = qf::ip_report(pseudo, roots);
        write_csv("fig3_ipdist.csv", [&](std::ostream& o) { qf::write_fig3_csv(report, o); });
    } else {
        std::cerr << "warning: fewer than 2 IP rows; fig3_ipdist.csv skipped\n";
    }

    std::size_t annotations_skipped = 0;
    if (!a.annotations_path.empty()) {
        auto ann_in = open_input(a.annotations_path);
        auto annotations = qf::parse_annotations(ann_in);
        auto table = qf::frame_table(annotations, ip, qf::quote_author_map(forest));
        annotations_skipped = table.skipped_unresolved;
        write_csv("table1_frames.csv", [&](std::ostream& o) { qf::write_table1_csv(table, o); });
    } else {
        std::cerr << "notice: no annotations file; table1_frames.csv skipped\n";
    }

    // DOT exports of the largest known-rho trees.
    std::vector<const qf::QuoteTree*> known;
    {
        std::set<qf::TweetId> known_ids;
        for (const auto& s : summaries) known_ids.insert(s.tree_id);
        for (const auto& t : forest.trees)
            if (known_ids.count(t.tree_id())) known.push_back(&t);
    }
    std::sort(known.begin(), known.end(), [](const qf::QuoteTree* x, const qf::QuoteTree* y) {
        if (x->size() != y->size()) return x->size() > y->size();
        return x->tree_id() < y->tree_id();
    });
    int n_dot = std::min<int>(a.dot_count, static_cast<int>(known.size()));
    for (int i = 0; i < n_dot; ++i) {
        const auto& tree = *known[i];
        write_file(out_dir / ("tree_" + tree.tree_id() + ".dot"), qf::export_tree_dot(tree, ip));
    }

    qf::RunManifest m;
    m.command = "metrics";
    m.add_input("forest", forest_csv);
    m.add_input("retweeters", retweeters_csv);
    m.add_input("ip", a.ip_path);
    if (!a.annotations_path.empty()) m.add_input("annotations", a.annotations_path);
    m.flags["bin_width"] = qf::format_fixed6(a.bin_width);
    m.flags["event_weighted_quoters"] = a.event_weighted_quoters ? "1" : "0";
    m.flags["cutoff_small"] = std::to_string(c1);
    m.flags["cutoff_medium"] = std::to_string(c2);
    m.row_counts["trees"] = static_cast<std::int64_t>(forest.trees.size());
    m.row_counts["trees_known_rho"] = static_cast<std::int64_t>(summaries.size());
    m.row_counts["ip_users"] = static_cast<std::int64_t>(ip.size());
    m.row_counts["user_summaries"] = static_cast<std::int64_t>(user_curves.users.size());
    m.row_counts["depth2_records"] = static_cast<std::int64_t>(d2.records.size());
    m.row_counts["dot_exports"] = n_dot;
    m.diagnostics["trees_unknown_rho"] =
        static_cast<std::int64_t>(forest.trees.size() - summaries.size());
    m.diagnostics["annotations_skipped"] = static_cast<std::int64_t>(annotations_skipped);
    qf::write_manifest(m, out_dir);

    std::cerr << "metrics: " << summaries.size() << " known-rho trees -> " << out_dir.string()
              << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quote-cascade trees, ideal points and affiliation/interaction metrics"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags are accepted after the subcommand

    GlobalOpts g;
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    std::int64_t seed_flag = -1;
    app.add_option("--seed", seed_flag, "seed override");
    app.add_option("--out", g.out, "output directory");

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--config", synth_args.config_path, "synth config JSON")->required();

    TreesArgs trees_args;
    auto* trees = app.add_subcommand("trees", "build the quote forest");
    trees->add_option("--events", trees_args.events_path, "events ndjson")->required();
    trees->add_option("--user-stats", trees_args.user_stats_path, "user stats csv")->required();
    trees->add_option("--min-tweets", trees_args.min_tweets, "minimum activity");
    trees->add_option("--min-lang-share", trees_args.min_lang_share, "minimum language share");
    trees->add_option("--follower-threshold", trees_args.follower_threshold,
                      "\"median\" or a fixed count (strictly-above filter)");
    trees->add_option("--t0", trees_args.t0, "root window start (inclusive)");
    trees->add_option("--t1", trees_args.t1, "root window end (inclusive)");
    trees->add_option("--coverage-q", trees_args.coverage_q, "coverage quantiles");
    trees->add_option("--pingpong-w", trees_args.pingpong_w, "terminal subchain windows");
    trees->add_flag("--lenient", trees_args.lenient, "skip malformed event lines");

    IpArgs ip_args;
    auto* ip = app.add_subcommand("ip", "fit anchored ideal points");
    ip->add_option("--follows", ip_args.follows_path, "user_id,elite_id edges csv")->required();
    ip->add_option("--elites", ip_args.elites_path, "elite_id,phi csv")->required();
    ip->add_option("--roots", ip_args.roots_path, "root user ids (one per line)");
    ip->add_option("--truth", ip_args.truth_path,
                   "ground-truth user_id,theta csv; records the recovery correlation");
    ip->add_option("--gamma", ip_args.cfg.gamma, "distance weight");
    ip->add_option("--min-elites", ip_args.cfg.min_elites, "minimum followed elites");
    ip->add_option("--prior-sd-theta", ip_args.cfg.prior_sd_theta, "theta prior sd");
    ip->add_option("--prior-sd-beta", ip_args.cfg.prior_sd_beta, "beta prior sd");
    ip->add_option("--max-iters", ip_args.cfg.max_iters, "Newton iteration cap");
    ip->add_option("--tol", ip_args.cfg.tol, "gradient norm tolerance");

    MetricsArgs metrics_args;
    auto* metrics = app.add_subcommand("metrics", "figure CSVs and DOT exports");
    metrics->add_option("--forest", metrics_args.forest_dir, "trees output directory")->required();
    metrics->add_option("--ip", metrics_args.ip_path, "ip csv (or truth users csv)")->required();
    metrics->add_option("--annotations", metrics_args.annotations_path, "frame annotations csv");
    metrics->add_option("--bin-lo", metrics_args.bin_lo, "x-range lower edge");
    metrics->add_option("--bin-hi", metrics_args.bin_hi, "x-range upper edge");
    metrics->add_option("--bin-width", metrics_args.bin_width, "bin width");
    metrics->add_option("--coverage-q", metrics_args.coverage_q, "size-class quantiles");
    metrics->add_flag("--event-weighted-quoters", metrics_args.event_weighted_quoters,
                      "weight <Q> by quote events instead of distinct users");
    metrics->add_option("--dot-count", metrics_args.dot_count, "number of DOT exports");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }
    if (seed_flag >= 0) g.seed = static_cast<std::uint64_t>(seed_flag);

    try {
        if (synth->parsed()) return run_synth(g, synth_args);
        if (trees->parsed()) return run_trees(g, trees_args);
        if (ip->parsed()) return run_ip(g, ip_args);
        if (metrics->parsed()) return run_metrics(g, metrics_args);
        throw UsageError("no subcommand selected");
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
