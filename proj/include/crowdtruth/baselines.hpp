#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crowdtruth/dataset.hpp"
#include "crowdtruth/matrix.hpp"

namespace crowdtruth {

struct TruthEstimate {
    Matrix posterior;         // J x K, rows on the simplex
    std::vector<int> argmax;  // lowest-index tie-break
};

struct GladPriors {
    double mu_e = 1.0, sigma2_e = 1.0;
    double mu_d = 0.0, sigma2_d = 1.0;
    double gamma = 1.0;  // Dirichlet smoothing on the class prior
    double tolerance = 1e-6;
    int max_rounds = 200;
};

struct GladParams {
    std::vector<double> e, d;
    std::vector<double> theta;
    double gamma = 1.0;
};

struct DsParams {
    std::vector<Matrix> confusion;  // per worker, K x K row-stochastic
    std::vector<double> class_prior;
};

struct GladFit {
    GladParams params;
    TruthEstimate truth;
    // Penalized log-likelihood after each EM round: the data marginal
    // plus the smoothing and Normal prior terms the M-step maximizes,
    // so the sequence is provably non-decreasing.
    std::vector<double> trace;
};

struct DsFit {
    DsParams params;
    TruthEstimate truth;
    std::vector<double> trace;  // same penalized form as GladFit::trace
};

TruthEstimate majority_vote(const ResponseMatrix& data);

GladFit glad_fit(const ResponseMatrix& data, const GladPriors& priors, std::uint64_t seed);

// seed is accepted for interface uniformity; the EM here is
// deterministic (init from majority vote) and never draws from it.
DsFit ds_fit(const ResponseMatrix& data, double smoothing = 0.01, std::uint64_t seed = 0);

int argmax_lowest_tie(std::span<const double> xs);

void export_truth_csv(const TruthEstimate& truth, const ResponseMatrix& data,
                      const std::filesystem::path& path);

}  // namespace crowdtruth
