#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "crowdtruth/baselines.hpp"
#include "crowdtruth/dataset.hpp"
#include "crowdtruth/sdr.hpp"

namespace crowdtruth {

struct SynthSpec {
    int I = 0, J = 0, K = 0, M = 1;
    SdrHyperParams hp;  // priors to draw e,d,u,v and the Dirichlet for phi
    int responses_per_question = 0;
    double group_separation = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthTruth {
    SdrParams params;
    Matrix phi;              // I x M true preference probabilities
    std::vector<int> group;  // dominant group per worker
    std::vector<int> z;          // per response, sampled preference
    std::vector<int> perceived;  // per response, sampled subjective truth l
    GoldLabels gold;             // largest-group perceived argmax
};

struct SynthData {
    ResponseMatrix data;
    SynthTruth truth;
};

SynthData generate_sdr(const SynthSpec& spec);

// Single-truth generator for baseline recovery tests. With
// responses_per_question = 0 every worker answers every question.
struct GladSynthPriors {
    double mu_e = 1.0, sigma2_e = 1.0;
    double mu_d = 0.0, sigma2_d = 1.0;
    double gamma = 1.0;
};

struct GladSynthData {
    ResponseMatrix data;
    GoldLabels gold;
    std::vector<double> e, d;
    std::vector<double> theta;
};

GladSynthData generate_glad(int I, int J, int K, const GladSynthPriors& priors, std::uint64_t seed,
                            int responses_per_question = 0);

void write_synth_truth_json(const SynthTruth& truth, const ResponseMatrix& data,
                            const std::filesystem::path& path);

}  // namespace crowdtruth
