#include "crowdtruth/subjectivity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "crowdtruth/numeric.hpp"

namespace crowdtruth {

namespace {

// Perceived-answer distributions for question j, one row per preference.
Matrix psi_for_question(int j, const SdrParams& params) {
    const int M = params.u.rows(), K = params.u.cols();
    Matrix psi(M, K);
    for (int m = 0; m < M; ++m) {
        auto probs = truth_softmax(params.u.row(m), params.v.row(j));
        for (int k = 0; k < K; ++k) psi(m, k) = probs[k];
    }
    return psi;
}

// Per-cluster marginal over options: mix psi rows by the centroid.
Matrix cluster_marginals(int j, const ClusterModel& model, const SdrParams& params) {
    const int M = params.u.rows(), K = params.u.cols();
    Matrix psi = psi_for_question(j, params);
    Matrix q(model.C, K);
    for (int c = 0; c < model.C; ++c)
        for (int m = 0; m < M; ++m) {
            double w = model.centroids(c, m);
            for (int k = 0; k < K; ++k) q(c, k) += w * psi(m, k);
        }
    return q;
}

}  // namespace

SubjectivityEstimate mc_subjectivity(int j, const ClusterModel& model, const SdrParams& params,
                                     long long T, std::uint64_t seed) {
    if (T < 1) throw std::invalid_argument("mc_subjectivity: T must be >= 1");
    const int K = params.u.cols();
    Matrix psi = psi_for_question(j, params);
    Rng rng(derive_seed(seed, "subjectivity/mc", static_cast<std::uint64_t>(j)));

    std::vector<long long> stamp(K, -1);
    double total = 0.0, total_sq = 0.0;
    for (long long t = 0; t < T; ++t) {
        int distinct = 0;
        for (int c = 0; c < model.C; ++c) {
            int z = rng.discrete(model.centroids.row(c));
            int l = rng.discrete(psi.row(z));
            if (stamp[l] != t) {
                stamp[l] = t;
                ++distinct;
            }
        }
        total += distinct;
        total_sq += static_cast<double>(distinct) * distinct;
    }

    SubjectivityEstimate est;
    est.T = T;
    est.value = total / static_cast<double>(T);
    if (T > 1) {
        double var = (total_sq - total * total / T) / static_cast<double>(T - 1);
        est.stderr_ = std::sqrt(std::max(0.0, var) / static_cast<double>(T));
    }
    return est;
}

double exact_subjectivity(int j, const ClusterModel& model, const SdrParams& params) {
    const int K = params.u.cols(), C = model.C;
    double outcomes = 1.0;
    for (int c = 0; c < C; ++c) {
        outcomes *= K;
        if (outcomes > 1e6)
            throw std::runtime_error("exact_subjectivity: K^C exceeds 10^6, use mc_subjectivity");
    }
    Matrix q = cluster_marginals(j, model, params);

    std::vector<int> draw(C, 0);
    std::vector<char> seen(K);
    double expectation = 0.0;
    for (;;) {
        double prob = 1.0;
        std::fill(seen.begin(), seen.end(), 0);
        int distinct = 0;
        for (int c = 0; c < C; ++c) {
            prob *= q(c, draw[c]);
            if (!seen[draw[c]]) {
                seen[draw[c]] = 1;
                ++distinct;
            }
        }
        expectation += prob * distinct;

        int pos = C - 1;
        while (pos >= 0 && draw[pos] == K - 1) draw[pos--] = 0;
        if (pos < 0) break;
        ++draw[pos];
    }
    return expectation;
}

namespace {

std::vector<int> order_desc(const std::vector<double>& values,
                            const std::vector<std::string>& labels) {
    std::vector<int> order(values.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = static_cast<int>(j);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        if (values[a] != values[b]) return values[a] > values[b];
        return labels[a] < labels[b];
    });
    return order;
}

std::vector<int> ranks_from_order(const std::vector<int>& order) {
    std::vector<int> rank(order.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) rank[order[pos]] = static_cast<int>(pos) + 1;
    return rank;
}

}  // namespace

QuestionRankings rank_questions(const SdrParams& params,
                                const std::vector<SubjectivityEstimate>& subjectivity,
                                const std::vector<std::string>& question_labels) {
    const std::size_t J = params.d.size();
    if (subjectivity.size() != J || question_labels.size() != J)
        throw std::invalid_argument("rank_questions: need one estimate and label per question");

    std::vector<double> subj_values(J);
    for (std::size_t j = 0; j < J; ++j) subj_values[j] = subjectivity[j].value;

    QuestionRankings r;
    r.difficulty_order = order_desc(params.d, question_labels);
    r.subjectivity_order = order_desc(subj_values, question_labels);
    r.difficulty_rank = ranks_from_order(r.difficulty_order);
    r.subjectivity_rank = ranks_from_order(r.subjectivity_order);
    return r;
}

void export_rankings_csv(const SdrParams& params,
                         const std::vector<SubjectivityEstimate>& subjectivity,
                         const QuestionRankings& rankings, const ResponseMatrix& data,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_rankings_csv: cannot write " + path.string());
    out << "question,difficulty_estimate,difficulty_rank,subjectivity_estimate,subjectivity_rank\n";
    char d_buf[64], s_buf[64];
    for (int j = 0; j < data.question_count(); ++j) {
        std::snprintf(d_buf, sizeof(d_buf), "%.12g", params.d[j]);
        std::snprintf(s_buf, sizeof(s_buf), "%.12g", subjectivity[j].value);
        out << data.questions[j] << ',' << d_buf << ',' << rankings.difficulty_rank[j] << ','
            << s_buf << ',' << rankings.subjectivity_rank[j] << '\n';
    }
}

}  // namespace crowdtruth
