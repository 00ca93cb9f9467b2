#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace crowdtruth {

// Deterministic random source. The engine (mt19937_64) is fully specified
// by the standard; every distribution is hand-rolled on top of it so that
// streams are reproducible bit-for-bit regardless of the standard library.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53 bits of precision.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform integer in {0, ..., n-1}, unbiased.
    std::size_t uniform_below(std::size_t n);

    double normal(double mean, double stddev);

    // Gamma(shape, 1) via Marsaglia-Tsang.
    double gamma(double shape);

    std::vector<double> dirichlet(std::span<const double> alpha);

    // Sample an index proportional to non-negative weights (need not sum to 1).
    int discrete(std::span<const double> weights);

  private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

// Derive an independent child seed from a master seed and a stream name.
// Used so that one --seed flag drives every stage of a pipeline without
// the stages sharing a stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index = 0);

}  // namespace crowdtruth
