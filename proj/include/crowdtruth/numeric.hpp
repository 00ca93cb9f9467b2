#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace crowdtruth {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + exp(x)) without overflow for large |x|.
inline double softplus(double x) {
    if (x > 35.0) return x;
    if (x < -35.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

inline double log_sum_exp(std::span<const double> xs) {
    double hi = xs[0];
    for (double x : xs)
        if (x > hi) hi = x;
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double x : xs) acc += std::exp(x - hi);
    return hi + std::log(acc);
}

// Stable softmax via max subtraction. Output aliases allowed.
inline void softmax_inplace(std::vector<double>& xs) {
    double hi = xs[0];
    for (double x : xs)
        if (x > hi) hi = x;
    double total = 0.0;
    for (double& x : xs) {
        x = std::exp(x - hi);
        total += x;
    }
    for (double& x : xs) x /= total;
}

// Negative log density of Normal(mean, var), constants included.
inline double normal_neg_log_pdf(double x, double mean, double var) {
    const double two_pi = 6.283185307179586476925286766559;
    double z = x - mean;
    return 0.5 * std::log(two_pi * var) + z * z / (2.0 * var);
}

inline double mean_of(std::span<const double> xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return acc / static_cast<double>(xs.size());
}

inline double sample_variance(std::span<const double> xs) {
    if (xs.size() < 2) return 0.0;
    double m = mean_of(xs);
    double acc = 0.0;
    for (double x : xs) acc += (x - m) * (x - m);
    return acc / static_cast<double>(xs.size() - 1);
}

}  // namespace crowdtruth
