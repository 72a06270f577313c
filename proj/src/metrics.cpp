#include "qf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <tuple>

#include "qf/io_util.hpp"

namespace qf {

namespace {

std::optional<double> lookup(const IpMap& ip, const UserId& user) {
    auto it = ip.find(user);
    if (it == ip.end()) return std::nullopt;
    return it->second;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

// Linear interpolation between order statistics, h = (n-1)p.
double quantile_sorted(std::span<const double> sorted, double p) {
    double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    auto lo = static_cast<std::size_t>(h);
    double frac = h - static_cast<double>(lo);
    std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

std::vector<TreeValenceSummary> summarize_trees(const Forest& forest, const IpMap& ip,
                                                std::size_t cutoff_small,
                                                std::size_t cutoff_medium,
                                                bool distinct_quoters) {
    std::vector<TreeValenceSummary> out;
    for (const auto& tree : forest.trees) {
        auto rho = lookup(ip, tree.root().user_id);
        if (!rho) continue;
        TreeValenceSummary s;
        s.tree_id = tree.tree_id();
        s.rho = *rho;
        s.size = tree.size();
        s.avg_depth = avg_depth(tree);
        s.size_class = size_class(tree.size(), cutoff_small, cutoff_medium);

        std::vector<double> r_ips;
        for (const auto& u : tree.retweeter_ids)
            if (auto v = lookup(ip, u)) r_ips.push_back(*v);
        if (!r_ips.empty()) {
            s.mean_r = mean_of(r_ips);
            s.n_r = r_ips.size();
        }

        std::vector<double> q_ips;
        if (distinct_quoters) {
            std::set<UserId> quoters;
            for (const auto& n : tree.nodes)
                if (n.depth == 1) quoters.insert(n.user_id);
            for (const auto& u : quoters)
                if (auto v = lookup(ip, u)) q_ips.push_back(*v);
        } else {
            for (const auto& n : tree.nodes)
                if (n.depth == 1)
                    if (auto v = lookup(ip, n.user_id)) q_ips.push_back(*v);
        }
        if (!q_ips.empty()) {
            s.mean_q = mean_of(q_ips);
            s.n_q = q_ips.size();
        }
        out.push_back(std::move(s));
    }
    return out;
}

QrCurves qr_curves(std::span<const TreeValenceSummary> summaries, BinSpec bins) {
    QrCurves c{BinnedCurve(bins), BinnedCurve(bins),
               {BinnedCurve(bins), BinnedCurve(bins), BinnedCurve(bins)},
               {BinnedCurve(bins), BinnedCurve(bins), BinnedCurve(bins)}};
    for (const auto& s : summaries) {
        auto k = static_cast<std::size_t>(s.size_class);
        if (s.mean_r) {
            c.r_all.add(s.rho, *s.mean_r);
            c.r_by_size[k].add(s.rho, *s.mean_r);
        }
        if (s.mean_q) {
            c.q_all.add(s.rho, *s.mean_q);
            c.q_by_size[k].add(s.rho, *s.mean_q);
        }
    }
    return c;
}

const char* to_string(DivergenceX x) {
    switch (x) {
        case DivergenceX::rho: return "rho";
        case DivergenceX::mean_r: return "meanR";
        case DivergenceX::offset: return "offset";
    }
    return "?";
}

DivergenceCurves divergence_curves(std::span<const TreeValenceSummary> summaries,
                                   DivergenceX x_kind, BinSpec bins) {
    DivergenceCurves c{x_kind, BinnedCurve(bins),
                       {BinnedCurve(bins), BinnedCurve(bins), BinnedCurve(bins)}};
    for (const auto& s : summaries) {
        if (!s.mean_r || !s.mean_q) continue;
        double x = 0.0;
        switch (x_kind) {
            case DivergenceX::rho: x = s.rho; break;
            case DivergenceX::mean_r: x = *s.mean_r; break;
            case DivergenceX::offset: x = *s.mean_r - s.rho; break;
        }
        double y = *s.mean_q - *s.mean_r;
        c.all.add(x, y);
        c.by_root_class[static_cast<std::size_t>(classify_ip(s.rho))].add(x, y);
    }
    return c;
}

UserCurves user_summaries(const Forest& forest, const IpMap& ip, BinSpec bins) {
    // Event-level rho lists; one entry per (tree, retweeter) and per depth-1
    // quote node of a known-rho tree.
    std::map<UserId, std::vector<double>> rt_events, qt_events;
    for (const auto& tree : forest.trees) {
        auto rho = lookup(ip, tree.root().user_id);
        if (!rho) continue;
        for (const auto& u : tree.retweeter_ids) rt_events[u].push_back(*rho);
        for (const auto& n : tree.nodes)
            if (n.depth == 1) qt_events[n.user_id].push_back(*rho);
    }

    UserCurves out{{}, BinnedCurve(bins), BinnedCurve(bins), BinnedCurve(bins)};
    for (const auto& [user, rts] : rt_events) {
        auto qit = qt_events.find(user);
        if (qit == qt_events.end()) continue;
        auto theta = lookup(ip, user);
        if (!theta) continue;

        UserSummary s;
        s.user_id = user;
        s.theta = *theta;
        s.n_retweet_events = rts.size();
        s.n_quote_events = qit->second.size();
        s.mean_rho_retweeted = mean_of(rts);
        s.mean_rho_quoted = mean_of(qit->second);
        s.divergence = s.mean_rho_quoted - s.mean_rho_retweeted;

        std::vector<double> diffs;
        diffs.reserve(qit->second.size());
        for (double rho : qit->second) diffs.push_back(rho - s.mean_rho_retweeted);
        std::sort(diffs.begin(), diffs.end());
        s.q1 = quantile_sorted(diffs, 0.25);
        s.median = quantile_sorted(diffs, 0.5);
        s.q3 = quantile_sorted(diffs, 0.75);

        out.rt_vs_theta.add(s.theta, s.mean_rho_retweeted);
        out.qt_vs_theta.add(s.theta, s.mean_rho_quoted);
        out.div_vs_theta.add(s.theta, s.divergence);
        out.users.push_back(std::move(s));
    }
    return out;
}

Depth2Curves depth2_curve(const Forest& forest, const IpMap& ip, BinSpec bins,
                          std::size_t cutoff_small, std::size_t cutoff_medium) {
    Depth2Curves out{{}, BinnedCurve(bins),
                     {BinnedCurve(bins), BinnedCurve(bins), BinnedCurve(bins)}};
    for (const auto& tree : forest.trees) {
        auto rho = lookup(ip, tree.root().user_id);
        if (!rho) continue;
        SizeClass cls = size_class(tree.size(), cutoff_small, cutoff_medium);

        // Distinct known-IP secondary quoters grouped by the primary node.
        std::map<std::int32_t, std::set<UserId>> secondary;
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& n = tree.nodes[i];
            if (n.depth == 2) secondary[n.parent].insert(n.user_id);
        }
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& n = tree.nodes[i];
            if (n.depth != 1) continue;
            auto d1 = lookup(ip, n.user_id);
            if (!d1) continue;
            auto sec = secondary.find(static_cast<std::int32_t>(i));
            if (sec == secondary.end()) continue;
            std::vector<double> d2;
            for (const auto& u : sec->second)
                if (auto v = lookup(ip, u)) d2.push_back(*v);
            if (d2.empty()) continue;

            Depth2Record rec;
            rec.tree_id = tree.tree_id();
            rec.d1 = *d1;
            rec.rho = *rho;
            rec.mean_d2 = mean_of(d2);
            rec.n_d2 = d2.size();
            rec.size_class = cls;
            out.all.add(rec.x(), rec.y());
            out.by_size[static_cast<std::size_t>(cls)].add(rec.x(), rec.y());
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

namespace {

int heat_size_bin(std::size_t size, const HeatmapConfig& cfg) {
    // log2 bins starting at [2,4).
    int b = static_cast<int>(std::floor(std::log2(static_cast<double>(size)))) - 1;
    if (b < 0) b = 0;
    if (b >= cfg.n_size_bins) b = cfg.n_size_bins - 1;
    return b;
}

int heat_depth_bin(double d, const HeatmapConfig& cfg) {
    int b = static_cast<int>(std::floor((d - cfg.d_lo) / cfg.d_width));
    if (b < 0) b = 0;
    if (b >= cfg.n_d_bins) b = cfg.n_d_bins - 1;
    return b;
}

int rho_bin(double x, const BinSpec& spec) {
    int b = static_cast<int>(std::floor((x - spec.lo) / spec.width));
    if (b < 0) b = 0;
    if (b >= spec.n_bins()) b = spec.n_bins() - 1;
    return b;
}

}  // namespace

Heatmaps heatmaps(std::span<const TreeValenceSummary> summaries, HeatmapConfig cfg,
                  BinSpec rho_bins) {
    rho_bins.validate();
    Heatmaps h;
    h.cfg = cfg;
    h.rho_bins = rho_bins;
    for (auto& grid : h.cells)
        grid.assign(cfg.n_size_bins, std::vector<std::size_t>(cfg.n_d_bins, 0));
    for (auto& hist : h.rho_hist_by_size)
        hist.assign(static_cast<std::size_t>(rho_bins.n_bins()), 0);

    for (const auto& s : summaries) {
        auto cls = static_cast<std::size_t>(classify_ip(s.rho));
        ++h.cells[cls][heat_size_bin(s.size, cfg)][heat_depth_bin(s.avg_depth, cfg)];
        ++h.rho_hist_by_size[static_cast<std::size_t>(s.size_class)][rho_bin(s.rho, rho_bins)];
    }
    return h;
}

std::vector<FrameAnnotation> parse_annotations(std::istream& in) {
    std::vector<FrameAnnotation> out;
    std::string line;
    std::size_t lineno = 0;
    bool header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_line(line);
        if (!header) {
            if (f != std::vector<std::string>{"tweet_id", "frames"})
                throw std::runtime_error("annotations csv: bad header");
            header = true;
            continue;
        }
        if (f.size() != 2) throw std::runtime_error("annotations csv line " + std::to_string(lineno) + ": expected 2 fields");
        FrameAnnotation a;
        a.tweet_id = f[0];
        std::set<char> labels;
        for (const auto& tok : split_line(f[1], '|')) {
            if (tok.size() != 1 || tok[0] < 'A' || tok[0] > 'H')
                throw std::runtime_error("annotations csv line " + std::to_string(lineno) +
                                         ": frame labels must be in A..H");
            labels.insert(tok[0]);
        }
        if (labels.empty())
            throw std::runtime_error("annotations csv line " + std::to_string(lineno) + ": empty label set");
        a.frames.assign(labels.begin(), labels.end());
        out.push_back(std::move(a));
    }
    if (!header) throw std::runtime_error("annotations csv: missing header");
    return out;
}

QuoteAuthorMap quote_author_map(const Forest& forest) {
    QuoteAuthorMap map;
    for (const auto& tree : forest.trees)
        for (const auto& n : tree.nodes)
            if (n.depth > 0) map.emplace(n.tweet_id, QuoteRef{tree.tree_id(), n.user_id});
    return map;
}

FrameTable frame_table(std::span<const FrameAnnotation> annotations, const IpMap& ip,
                       const QuoteAuthorMap& quotes) {
    FrameTable table;

    // Merge duplicate annotation rows for the same quote.
    std::map<TweetId, std::set<char>> merged;
    for (const auto& a : annotations)
        merged[a.tweet_id].insert(a.frames.begin(), a.frames.end());

    std::map<std::tuple<TweetId, char, int>, std::size_t> counts;
    std::set<TweetId> trees;
    for (const auto& [tweet_id, frames] : merged) {
        auto q = quotes.find(tweet_id);
        std::optional<double> theta;
        if (q != quotes.end()) theta = lookup(ip, q->second.user_id);
        if (!theta) {
            std::cerr << "warning: annotation for " << tweet_id
                      << " does not resolve to a quote with a known-IP author; skipped\n";
            ++table.skipped_unresolved;
            continue;
        }
        int cls = static_cast<int>(classify_ip(*theta));
        ++table.class_totals[{q->second.tree_id, cls}];
        trees.insert(q->second.tree_id);
        for (char f : frames) ++counts[{q->second.tree_id, f, cls}];
    }

    for (const auto& tree_id : trees) {
        for (char f = 'A'; f <= 'H'; ++f) {
            for (int cls = 0; cls < 3; ++cls) {
                FrameTable::Cell cell;
                cell.tree_id = tree_id;
                cell.frame = f;
                cell.cls = static_cast<IpClass>(cls);
                auto it = counts.find({tree_id, f, cls});
                cell.count = it == counts.end() ? 0 : it->second;
                auto tot = table.class_totals.find({tree_id, cls});
                cell.pct = (tot == table.class_totals.end() || tot->second == 0)
                               ? 0.0
                               : 100.0 * static_cast<double>(cell.count) /
                                     static_cast<double>(tot->second);
                table.cells.push_back(std::move(cell));
            }
        }
    }
    return table;
}

namespace {

std::string dot_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

const char* dot_color(const IpMap& ip, const UserId& user) {
    auto it = ip.find(user);
    if (it == ip.end()) return "gray";
    switch (classify_ip(it->second)) {
        case IpClass::left: return "blue";
        case IpClass::center: return "black";
        case IpClass::right: return "red";
    }
    return "gray";
}

}  // namespace

std::string export_tree_dot(const QuoteTree& tree, const IpMap& ip) {
    std::string out = "digraph quotetree {\n  node [shape=circle];\n";
    for (const auto& n : tree.nodes) {
        out += "  \"" + dot_escape(n.tweet_id) + "\" [color=" + dot_color(ip, n.user_id) + "];\n";
    }
    for (const auto& n : tree.nodes) {
        if (n.parent < 0) continue;
        out += "  \"" + dot_escape(tree.nodes[n.parent].tweet_id) + "\" -> \"" +
               dot_escape(n.tweet_id) + "\";\n";
    }
    out += "}\n";
    return out;
}

namespace {

void curve_rows(std::ostream& out, const std::string& prefix, const BinnedCurve& c) {
    for (int i = 0; i < c.n_bins(); ++i) {
        out << prefix << format_fixed6(c.lo(i)) << ',' << format_fixed6(c.hi(i)) << ','
            << c.count(i) << ',';
        if (c.count(i) >= 1) out << format_fixed6(c.mean(i));
        out << ',';
        if (c.count(i) >= 2) out << format_fixed6(c.stddev(i));
        out << '\n';
    }
}

}  // namespace

void write_fig3_csv(const IpReport& report, std::ostream& out) {
    out << "series,x,y\n";
    for (Eigen::Index i = 0; i < report.grid.size(); ++i)
        out << "kde_all," << format_fixed6(report.grid[i]) << ',' << format_fixed6(report.kde_all[i]) << '\n';
    if (report.kde_roots.size() > 0)
        for (Eigen::Index i = 0; i < report.grid.size(); ++i)
            out << "kde_roots," << format_fixed6(report.grid[i]) << ',' << format_fixed6(report.kde_roots[i]) << '\n';
    for (const auto& [x, y] : report.ecdf_all)
        out << "ecdf_all," << format_fixed6(x) << ',' << format_fixed6(y) << '\n';
    for (const auto& [x, y] : report.ecdf_roots)
        out << "ecdf_roots," << format_fixed6(x) << ',' << format_fixed6(y) << '\n';
}

void write_fig4_heatmap_csv(const Heatmaps& h, std::ostream& out) {
    out << "rho_class,size_lo,size_hi,avg_depth_lo,avg_depth_hi,count\n";
    for (int cls = 0; cls < 3; ++cls) {
        for (int sb = 0; sb < h.cfg.n_size_bins; ++sb) {
            for (int db = 0; db < h.cfg.n_d_bins; ++db) {
                out << to_string(static_cast<IpClass>(cls)) << ','
                    << (1ULL << (sb + 1)) << ',' << (1ULL << (sb + 2)) << ','
                    << format_fixed6(h.cfg.d_lo + h.cfg.d_width * db) << ','
                    << format_fixed6(h.cfg.d_lo + h.cfg.d_width * (db + 1)) << ','
                    << h.cells[cls][sb][db] << '\n';
            }
        }
    }
}

void write_fig4_rhodist_csv(const Heatmaps& h, std::ostream& out) {
    out << "size_class,bin_lo,bin_hi,count\n";
    for (int cls = 0; cls < 3; ++cls) {
        for (int i = 0; i < h.rho_bins.n_bins(); ++i) {
            out << to_string(static_cast<SizeClass>(cls)) << ','
                << format_fixed6(h.rho_bins.lo + h.rho_bins.width * i) << ','
                << format_fixed6(h.rho_bins.lo + h.rho_bins.width * (i + 1)) << ','
                << h.rho_hist_by_size[cls][i] << '\n';
        }
    }
}

void write_fig5_csv(const QrCurves& c, std::ostream& out) {
    out << "curve,size_class,bin_lo,bin_hi,n,mean,std\n";
    curve_rows(out, "R,all,", c.r_all);
    curve_rows(out, "Q,all,", c.q_all);
    for (int k = 0; k < 3; ++k) {
        std::string cls = to_string(static_cast<SizeClass>(k));
        curve_rows(out, "R," + cls + ",", c.r_by_size[k]);
        curve_rows(out, "Q," + cls + ",", c.q_by_size[k]);
    }
}

void write_fig6_csv(std::span<const DivergenceCurves> curves, std::ostream& out) {
    out << "x_kind,rho_class,bin_lo,bin_hi,n,mean,std\n";
    for (const auto& c : curves) {
        std::string kind = to_string(c.x_kind);
        curve_rows(out, kind + ",all,", c.all);
        for (int k = 0; k < 3; ++k)
            curve_rows(out, kind + "," + to_string(static_cast<IpClass>(k)) + ",", c.by_root_class[k]);
    }
}

void write_fig7_csv(const UserCurves& c, std::ostream& out) {
    out << "curve,bin_lo,bin_hi,n,mean,std\n";
    curve_rows(out, "mean_rho_retweeted,", c.rt_vs_theta);
    curve_rows(out, "mean_rho_quoted,", c.qt_vs_theta);
    curve_rows(out, "divergence,", c.div_vs_theta);
}

void write_user_summaries_csv(std::span<const UserSummary> users, std::ostream& out) {
    out << "user_id,theta,n_retweet_events,n_quote_events,mean_rho_retweeted,"
           "mean_rho_quoted,divergence,q1,median,q3\n";
    for (const auto& u : users) {
        out << u.user_id << ',' << format_fixed6(u.theta) << ',' << u.n_retweet_events << ','
            << u.n_quote_events << ',' << format_fixed6(u.mean_rho_retweeted) << ','
            << format_fixed6(u.mean_rho_quoted) << ',' << format_fixed6(u.divergence) << ','
            << format_fixed6(u.q1) << ',' << format_fixed6(u.median) << ','
            << format_fixed6(u.q3) << '\n';
    }
}

void write_fig8_csv(const Depth2Curves& c, std::ostream& out) {
    out << "size_class,bin_lo,bin_hi,n,mean,std\n";
    curve_rows(out, "all,", c.all);
    for (int k = 0; k < 3; ++k)
        curve_rows(out, std::string(to_string(static_cast<SizeClass>(k))) + ",", c.by_size[k]);
}

void write_table1_csv(const FrameTable& t, std::ostream& out) {
    out << "tree_id,frame,class,count,pct\n";
    for (const auto& cell : t.cells)
        out << cell.tree_id << ',' << cell.frame << ',' << to_string(cell.cls) << ','
            << cell.count << ',' << format_fixed6(cell.pct) << '\n';
}

}  // namespace qf
