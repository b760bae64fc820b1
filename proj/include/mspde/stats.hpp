#pragma once

#include "mspde/rng.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace mspde {

inline double mean(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double s = 0.0;
    for (double x : xs) s += (x - m) * (x - m);
    return s / static_cast<double>(xs.size() - 1);
}

/// L^p(Omega) (quasi)norm estimate from iid samples of a nonnegative
/// functional: (mean of x^p)^(1/p). p < 1 is treated identically.
inline double lp_norm_estimate(std::span<const double> xs, double p) {
    double s = 0.0;
    for (double x : xs) s += std::pow(x, p);
    if (xs.empty()) return 0.0;
    return std::pow(s / static_cast<double>(xs.size()), 1.0 / p);
}

struct ConfidenceInterval {
    double lower = 0.0;
    double upper = 0.0;
    double half_width() const { return 0.5 * (upper - lower); }
};

/// Percentile bootstrap for a statistic of iid samples. The statistic is
/// any callable mapping a sample vector to a real.
template <typename Stat>
ConfidenceInterval bootstrap_ci(std::span<const double> xs, Stat&& stat, int n_boot,
                                uint64_t seed, double level = 0.95) {
    const size_t n = xs.size();
    std::vector<double> replicas(static_cast<size_t>(n_boot));
    std::vector<double> resample(n);
    Rng rng(seed);
    std::uniform_int_distribution<size_t> pick(0, n - 1);
    for (int b = 0; b < n_boot; ++b) {
        for (size_t i = 0; i < n; ++i) resample[i] = xs[pick(rng)];
        replicas[static_cast<size_t>(b)] = stat(std::span<const double>(resample));
    }
    std::sort(replicas.begin(), replicas.end());
    const double alpha = 0.5 * (1.0 - level);
    auto at = [&](double q) {
        double pos = q * (n_boot - 1);
        size_t lo = static_cast<size_t>(pos);
        size_t hi = std::min(lo + 1, static_cast<size_t>(n_boot - 1));
        double w = pos - static_cast<double>(lo);
        return (1.0 - w) * replicas[lo] + w * replicas[hi];
    };
    return {at(alpha), at(1.0 - alpha)};
}

inline ConfidenceInterval bootstrap_mean_ci(std::span<const double> xs, int n_boot,
                                            uint64_t seed, double level = 0.95) {
    return bootstrap_ci(xs, [](std::span<const double> v) { return mean(v); }, n_boot, seed, level);
}

/// Batch-means samples for a correlated time series: the series is split
/// into `batches` contiguous blocks and each block is averaged. Bootstrap
/// over the batch means then gives a serviceable CI for ergodic averages.
inline std::vector<double> batch_means(std::span<const double> series, int batches) {
    std::vector<double> out;
    const size_t n = series.size();
    if (n == 0 || batches <= 0) return out;
    const size_t len = std::max<size_t>(1, n / static_cast<size_t>(batches));
    for (size_t start = 0; start + len <= n; start += len) {
        double s = 0.0;
        for (size_t i = start; i < start + len; ++i) s += series[i];
        out.push_back(s / static_cast<double>(len));
    }
    return out;
}

/// Least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
    const double mx = mean(x), my = mean(y);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

} // namespace mspde
