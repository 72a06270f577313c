#pragma once
// Deterministic random number generation. std::mt19937_64 output is fully
// specified by the standard, but the standard distributions are not, so the
// transforms below are implemented by hand to keep generated datasets
// byte-stable across compilers. Substreams are derived with splitmix64 so
// per-tree / per-user generation stays reproducible under any scheduling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace qf {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : base_seed_(seed), gen_(splitmix64(seed)) {}

    // Independent child stream identified by (seed, stream_id).
    Rng fork(std::uint64_t stream_id) const {
        return Rng(splitmix64(base_seed_ ^ splitmix64(stream_id + 0x51ed2701a9b4e22bULL)));
    }

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller, no state carried between calls.
    double normal(double mean = 0.0, double sd = 1.0) {
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        return mean + sd * z;
    }

    // Knuth inversion; adequate for the small means used by the generator.
    int poisson(double mean) {
        if (mean < 0.0) throw std::invalid_argument("poisson: negative mean");
        if (mean == 0.0) return 0;
        double limit = std::exp(-mean);
        double prod = uniform01();
        int n = 0;
        while (prod > limit) {
            prod *= uniform01();
            ++n;
        }
        return n;
    }

    // Index draw proportional to non-negative weights.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) throw std::invalid_argument("categorical: non-positive weight sum");
        double u = uniform01() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;
    }

private:
    std::uint64_t base_seed_;
    std::mt19937_64 gen_;
};

// Cumulative-sum table for repeated categorical draws from fixed weights.
class CategoricalTable {
public:
    explicit CategoricalTable(std::span<const double> weights) {
        cum_.reserve(weights.size());
        double acc = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("categorical: negative weight");
            acc += w;
            cum_.push_back(acc);
        }
        if (cum_.empty() || acc <= 0.0)
            throw std::invalid_argument("categorical: non-positive weight sum");
    }

    std::size_t draw(Rng& rng) const {
        double u = rng.uniform01() * cum_.back();
        auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        if (it == cum_.end()) --it;
        return static_cast<std::size_t>(it - cum_.begin());
    }

private:
    std::vector<double> cum_;
};

}  // namespace qf
