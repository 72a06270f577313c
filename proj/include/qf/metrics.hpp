#pragma once
// Figure-backing statistics relating tree structure to user valence:
// per-tree rho / <R> / <Q> summaries, divergence and depth-2 curves,
// user-centric behavior, heatmaps, frame tabulation and DOT export.

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qf/binned.hpp"
#include "qf/chains.hpp"
#include "qf/forest.hpp"
#include "qf/valence.hpp"

namespace qf {

using IpMap = std::map<UserId, double>;

struct TreeValenceSummary {
    TweetId tree_id;
    double rho = 0.0;               // root user IP; always known
    std::optional<double> mean_r;   // mean IP of known-IP retweeters
    std::optional<double> mean_q;   // mean IP of known-IP depth-1 quoters
    std::size_t n_r = 0;
    std::size_t n_q = 0;
    std::size_t size = 0;
    double avg_depth = 0.0;
    SizeClass size_class = SizeClass::small;
};

// One summary per tree whose root author has a known IP. <Q> averages over
// distinct depth-1 quoting users by default; event-weighted is available
// behind the flag for sensitivity runs.
std::vector<TreeValenceSummary> summarize_trees(const Forest& forest, const IpMap& ip,
                                                std::size_t cutoff_small,
                                                std::size_t cutoff_medium,
                                                bool distinct_quoters = true);

struct QrCurves {
    BinnedCurve r_all, q_all;
    std::array<BinnedCurve, 3> r_by_size, q_by_size;  // indexed by SizeClass
};

QrCurves qr_curves(std::span<const TreeValenceSummary> summaries, BinSpec bins = {});

enum class DivergenceX { rho, mean_r, offset };
const char* to_string(DivergenceX x);

struct DivergenceCurves {
    DivergenceX x_kind = DivergenceX::rho;
    BinnedCurve all;
    std::array<BinnedCurve, 3> by_root_class;  // indexed by IpClass of rho
};

// Per-bin stats of <Q> - <R> over trees carrying both means, against the
// chosen x (rho, <R>, or the offset <R> - rho).
DivergenceCurves divergence_curves(std::span<const TreeValenceSummary> summaries,
                                   DivergenceX x_kind, BinSpec bins = {});

struct UserSummary {
    UserId user_id;
    double theta = 0.0;
    std::size_t n_retweet_events = 0;
    std::size_t n_quote_events = 0;
    double mean_rho_retweeted = 0.0;
    double mean_rho_quoted = 0.0;
    double divergence = 0.0;  // mean_rho_quoted - mean_rho_retweeted
    // Quartiles of per-quote-event root rho relative to the user's retweet
    // baseline mean_rho_retweeted (linear-interpolation order statistics).
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};

struct UserCurves {
    std::vector<UserSummary> users;  // sorted by user_id
    BinnedCurve rt_vs_theta, qt_vs_theta, div_vs_theta;
};

// Event-level means per user over known-rho roots (multiplicity kept, one
// entry per retweet of a distinct root and per depth-1 quote node). Users
// need a known IP plus at least one event of each kind.
UserCurves user_summaries(const Forest& forest, const IpMap& ip, BinSpec bins = {});

struct Depth2Record {
    TweetId tree_id;
    double d1 = 0.0;       // primary quoter IP
    double rho = 0.0;      // root IP
    double mean_d2 = 0.0;  // mean IP of distinct known-IP secondary quoters
    std::size_t n_d2 = 0;
    SizeClass size_class = SizeClass::small;

    double x() const { return d1 - rho; }
    double y() const { return mean_d2 - d1; }
};

struct Depth2Curves {
    std::vector<Depth2Record> records;
    BinnedCurve all;
    std::array<BinnedCurve, 3> by_size;
};

// One record per primary-quoter node with known D1 and at least one
// known-IP secondary quoter; y = <D2> - D1 binned against x = D1 - rho.
Depth2Curves depth2_curve(const Forest& forest, const IpMap& ip, BinSpec bins,
                          std::size_t cutoff_small, std::size_t cutoff_medium);

struct HeatmapConfig {
    int n_size_bins = 11;   // log2 bins: [2,4), [4,8), ...
    double d_lo = 1.0;
    double d_width = 0.25;
    int n_d_bins = 12;      // average depth clipped into the last bin
};

struct Heatmaps {
    HeatmapConfig cfg;
    // cells[ip_class][size_bin][d_bin]
    std::array<std::vector<std::vector<std::size_t>>, 3> cells;
    BinSpec rho_bins;
    std::array<std::vector<std::size_t>, 3> rho_hist_by_size;  // [size_class][rho_bin]
};

Heatmaps heatmaps(std::span<const TreeValenceSummary> summaries, HeatmapConfig cfg = {},
                  BinSpec rho_bins = {});

struct FrameAnnotation {
    TweetId tweet_id;
    std::vector<char> frames;  // distinct labels in A..H
};

// tweet_id,frames rows where frames is a '|'-separated subset of A-H.
std::vector<FrameAnnotation> parse_annotations(std::istream& in);

struct QuoteRef {
    TweetId tree_id;
    UserId user_id;
};
using QuoteAuthorMap = std::unordered_map<TweetId, QuoteRef>;

// Quote tweet -> (tree, author) over all non-root nodes of the forest.
QuoteAuthorMap quote_author_map(const Forest& forest);

struct FrameTable {
    struct Cell {
        TweetId tree_id;
        char frame;
        IpClass cls;
        std::size_t count = 0;
        double pct = 0.0;  // 100 * count / distinct annotated quotes of this class
    };
    std::vector<Cell> cells;  // all frames x classes for each annotated tree
    std::map<std::pair<TweetId, int>, std::size_t> class_totals;
    std::size_t skipped_unresolved = 0;
};

// Counts quotes per (tree, frame, author class); multi-label quotes count
// once per frame. Annotations that do not resolve to a quote with a
// known-IP author are skipped and counted.
FrameTable frame_table(std::span<const FrameAnnotation> annotations, const IpMap& ip,
                       const QuoteAuthorMap& quotes);

// DOT digraph with nodes colored blue/black/red by IP class, gray unknown.
std::string export_tree_dot(const QuoteTree& tree, const IpMap& ip);

// CSV emitters (one per figure).
void write_fig3_csv(const IpReport& report, std::ostream& out);
void write_fig4_heatmap_csv(const Heatmaps& h, std::ostream& out);
void write_fig4_rhodist_csv(const Heatmaps& h, std::ostream& out);
void write_fig5_csv(const QrCurves& c, std::ostream& out);
void write_fig6_csv(std::span<const DivergenceCurves> curves, std::ostream& out);
void write_fig7_csv(const UserCurves& c, std::ostream& out);
void write_user_summaries_csv(std::span<const UserSummary> users, std::ostream& out);
void write_fig8_csv(const Depth2Curves& c, std::ostream& out);
void write_table1_csv(const FrameTable& t, std::ostream& out);

}  // namespace qf
