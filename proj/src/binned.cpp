#include "qf/binned.hpp"

#include <cmath>
#include <stdexcept>

namespace qf {

int BinSpec::n_bins() const {
    return static_cast<int>(std::round((hi - lo) / width));
}

void BinSpec::validate() const {
    if (!(width > 0.0) || !(hi > lo)) throw std::invalid_argument("BinSpec: bad range");
    double n = (hi - lo) / width;
    if (std::abs(n - std::round(n)) > 1e-9 || std::round(n) < 1.0)
        throw std::invalid_argument("BinSpec: range is not a whole number of bins");
}

BinnedCurve::BinnedCurve(BinSpec spec) : spec_(spec) {
    spec_.validate();
    auto n = static_cast<std::size_t>(spec_.n_bins());
    n_.assign(n, 0);
    sum_.assign(n, 0.0);
    sumsq_.assign(n, 0.0);
}

int BinnedCurve::bin_of(double x) const {
    auto i = static_cast<int>(std::floor((x - spec_.lo) / spec_.width));
    if (i < 0) i = 0;
    if (i >= spec_.n_bins()) i = spec_.n_bins() - 1;
    return i;
}

void BinnedCurve::add(double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y))
        throw std::invalid_argument("BinnedCurve::add: non-finite observation");
    int i = bin_of(x);
    ++n_[i];
    sum_[i] += y;
    sumsq_[i] += y * y;
}

std::size_t BinnedCurve::total_count() const {
    std::size_t total = 0;
    for (std::size_t c : n_) total += c;
    return total;
}

double BinnedCurve::mean(int i) const {
    if (n_[i] == 0) throw std::logic_error("BinnedCurve::mean on empty bin");
    return sum_[i] / static_cast<double>(n_[i]);
}

double BinnedCurve::stddev(int i) const {
    if (n_[i] < 2) throw std::logic_error("BinnedCurve::stddev needs count >= 2");
    double n = static_cast<double>(n_[i]);
    double m = sum_[i] / n;
    double var = (sumsq_[i] - n * m * m) / (n - 1.0);
    return var > 0.0 ? std::sqrt(var) : 0.0;
}

double least_squares_slope(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("least_squares_slope: need >= 2 paired points");
    double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: degenerate x");
    return sxy / sxx;
}

double bin_mean_slope(const BinnedCurve& curve, std::size_t min_count) {
    std::vector<double> xs, ys;
    for (int i = 0; i < curve.n_bins(); ++i) {
        if (curve.count(i) < std::max<std::size_t>(min_count, 1)) continue;
        xs.push_back(curve.center(i));
        ys.push_back(curve.mean(i));
    }
    return least_squares_slope(xs, ys);
}

}  // namespace qf
