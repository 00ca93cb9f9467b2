#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crowdtruth/dataset.hpp"
#include "crowdtruth/matrix.hpp"
#include "crowdtruth/optimizer.hpp"
#include "crowdtruth/rng.hpp"

namespace crowdtruth {

struct SdrHyperParams {
    int M = 1;
    std::vector<double> alpha;  // length M, Dirichlet concentration
    double mu_e = 1.0, sigma2_e = 1.0;
    double mu_d = 0.0, sigma2_d = 1.0;
    double mu_u = 0.0, sigma2_u = 1.0;
    double mu_v = 0.0, sigma2_v = 1.0;

    static SdrHyperParams with_m(int m);  // alpha = (1,...,1)
    void validate() const;
};

struct SdrParams {
    std::vector<double> e;  // I, worker expertise
    std::vector<double> d;  // J, question difficulty
    Matrix u;               // M x K, preference weights
    Matrix v;               // J x K, question features

    std::size_t flat_size() const;
    std::vector<double> pack() const;
    void unpack(std::span<const double> x);
};

// z is indexed by response position in ResponseMatrix::triplets, which
// is one-to-one with (worker, question) pairs.
struct GibbsState {
    std::vector<int> z;
    std::vector<std::vector<int>> counts;  // I x M, counts[i][m] = N^m_i

    static GibbsState from_assignments(const ResponseMatrix& data, std::vector<int> z, int M);
    void check_consistent(const ResponseMatrix& data) const;
};

struct PreferencePosterior {
    Matrix phi_hat;  // I x M, rows on the simplex
};

struct FitSchedule {
    int outer_iterations = 50;
    int burn_in = 20;
    OptimizerConfig optimizer;
};

struct SdrRound {
    double q_before = 0.0;  // objective entering the optimization phase
    double q_after = 0.0;   // objective after it
};

struct SdrFit {
    SdrParams params;
    PreferencePosterior posterior;
    std::vector<SdrRound> trace;
};

double logistic_correct_prob(double e, double d);

std::vector<double> truth_softmax(std::span<const double> u_m, std::span<const double> v_j);

// P(r_ij = r | z_ij = m) with the perceived label marginalized out.
double response_marginal(const SdrParams& params, int i, int j, int m, int r);

// Normalized conditional over m for response index t, with t's own
// contribution removed from the counts.
std::vector<double> gibbs_conditional(const ResponseMatrix& data, int t, const GibbsState& state,
                                      const SdrParams& params, const SdrHyperParams& hp);

// Resamples z for response t and keeps counts consistent.
int gibbs_step(const ResponseMatrix& data, int t, GibbsState& state, const SdrParams& params,
               const SdrHyperParams& hp, Rng& rng);

// Negative log joint over (e,d,u,v) given z: response marginals plus
// Normal prior densities with their constants.
double objective_q(const SdrParams& params, const GibbsState& state, const ResponseMatrix& data,
                   const SdrHyperParams& hp);

// Gradient of objective_q, flattened as [e, d, u row-major, v row-major].
std::vector<double> gradient_q(const SdrParams& params, const GibbsState& state,
                               const ResponseMatrix& data, const SdrHyperParams& hp);

SdrFit fit_sdr(const ResponseMatrix& data, const SdrHyperParams& hp, const FitSchedule& schedule,
               std::uint64_t seed);

// Predictive distribution over the K options for worker i on question j.
std::vector<double> predict_response(const SdrParams& params, const PreferencePosterior& posterior,
                                     int i, int j);

}  // namespace crowdtruth
