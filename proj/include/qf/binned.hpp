#pragma once
// Fixed-width binned mean/std/count series, the backing data of every curve
// figure. Out-of-range x values are clipped into the edge bins.

#include <cstddef>
#include <span>
#include <vector>

namespace qf {

struct BinSpec {
    double lo = -2.5;
    double hi = 2.5;
    double width = 0.25;

    int n_bins() const;
    void validate() const;
};

class BinnedCurve {
public:
    explicit BinnedCurve(BinSpec spec = {});

    void add(double x, double y);

    int n_bins() const { return spec_.n_bins(); }
    const BinSpec& spec() const { return spec_; }
    int bin_of(double x) const;  // clipped into [0, n_bins)

    double lo(int i) const { return spec_.lo + spec_.width * i; }
    double hi(int i) const { return spec_.lo + spec_.width * (i + 1); }
    double center(int i) const { return spec_.lo + spec_.width * (i + 0.5); }

    std::size_t count(int i) const { return n_[i]; }
    std::size_t total_count() const;
    double mean(int i) const;    // requires count >= 1
    double stddev(int i) const;  // sample std, requires count >= 2

private:
    BinSpec spec_;
    std::vector<std::size_t> n_;
    std::vector<double> sum_;
    std::vector<double> sumsq_;
};

// Slope of the ordinary least-squares line through (x, y) pairs.
double least_squares_slope(std::span<const double> xs, std::span<const double> ys);

// OLS slope over populated bin means (count >= min_count) vs bin centers.
double bin_mean_slope(const BinnedCurve& curve, std::size_t min_count = 1);

}  // namespace qf
