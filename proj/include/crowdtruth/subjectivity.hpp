#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "crowdtruth/clustering.hpp"
#include "crowdtruth/sdr.hpp"

namespace crowdtruth {

struct SubjectivityEstimate {
    double value = 1.0;  // expected number of distinct cluster answers, in [1, min(K, C)]
    long long T = 0;
    double stderr_ = 0.0;
};

// Monte Carlo estimate: each iteration draws one perceived answer per
// cluster and counts how many distinct options appear.
SubjectivityEstimate mc_subjectivity(int j, const ClusterModel& model, const SdrParams& params,
                                     long long T, std::uint64_t seed);

// Full enumeration over the K^C joint outcomes; refuses above 10^6.
double exact_subjectivity(int j, const ClusterModel& model, const SdrParams& params);

struct QuestionRankings {
    std::vector<int> difficulty_order;     // question indices, hardest first
    std::vector<int> subjectivity_order;   // most subjective first
    std::vector<int> difficulty_rank;      // 1-based rank per question
    std::vector<int> subjectivity_rank;
};

// Descending sorts; ties broken by question identifier.
QuestionRankings rank_questions(const SdrParams& params,
                                const std::vector<SubjectivityEstimate>& subjectivity,
                                const std::vector<std::string>& question_labels);

void export_rankings_csv(const SdrParams& params,
                         const std::vector<SubjectivityEstimate>& subjectivity,
                         const QuestionRankings& rankings, const ResponseMatrix& data,
                         const std::filesystem::path& path);

}  // namespace crowdtruth
