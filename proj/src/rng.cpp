#include "crowdtruth/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace crowdtruth {

std::size_t Rng::uniform_below(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    // Rejection on the tail of the 64-bit range removes modulo bias.
    std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n + 1) % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x > limit);
    return static_cast<std::size_t>(x % n);
}

double Rng::normal(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_normal_;
    }
    // Box-Muller; no rejection, so the stream advances a fixed two draws.
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double two_pi = 6.283185307179586476925286766559;
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_normal_ = r * std::sin(two_pi * u2);
    has_spare_ = true;
    return mean + stddev * r * std::cos(two_pi * u2);
}

double Rng::gamma(double shape) {
    if (shape <= 0.0) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
        double u = uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal(0.0, 1.0);
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform01();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

std::vector<double> Rng::dirichlet(std::span<const double> alpha) {
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        out[i] = gamma(alpha[i]);
        total += out[i];
    }
    if (total <= 0.0) {
        // All gammas underflowed; fall back to the least-unreasonable point.
        for (double& x : out) x = 1.0 / static_cast<double>(out.size());
        return out;
    }
    for (double& x : out) x /= total;
    return out;
}

int Rng::discrete(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("discrete: weights must have positive sum");
    double u = uniform01() * total;
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] > 0.0) last_positive = static_cast<int>(i);
        acc += weights[i];
        if (u < acc) return static_cast<int>(i);
    }
    return last_positive;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the stream name
    for (unsigned char c : stream) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return splitmix64(splitmix64(master ^ h) ^ index);
}

}  // namespace crowdtruth
