#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "crowdtruth/rng.hpp"
#include "crowdtruth/subjectivity.hpp"

using namespace crowdtruth;

namespace {

// params with M preference rows whose perceived-truth softmax we control
// via u products; single question unless J given.
SdrParams params_for(const Matrix& u, int J, int K) {
    SdrParams p;
    p.e = {1.0};
    p.d.assign(J, 0.0);
    p.u = u;
    p.v = Matrix(J, K, 1.0);  // products equal u entries directly
    return p;
}

ClusterModel model_with_centroids(const Matrix& centroids) {
    ClusterModel m;
    m.C = centroids.rows();
    m.centroids = centroids;
    m.assignment.assign(1, 0);
    m.sizes.assign(m.C, 0);
    m.sizes[0] = 1;
    return m;
}

// per-cluster marginal over options, then expected distinct count by
// inclusion-exclusion over options: E = sum_k (1 - prod_c 1 - q_ck).
double distinct_by_linearity(int j, const ClusterModel& model, const SdrParams& params) {
    int K = params.v.cols();
    int M = params.u.rows();
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
        double none = 1.0;
        for (int c = 0; c < model.C; ++c) {
            double q = 0.0;
            for (int m = 0; m < M; ++m) {
                auto psi = truth_softmax(params.u.row(m), params.v.row(j));
                q += model.centroids(c, m) * psi[k];
            }
            none *= 1.0 - q;
        }
        total += 1.0 - none;
    }
    return total;
}

Matrix one_hot_rows(const std::vector<int>& hots, int K, double scale = 50.0) {
    Matrix u(static_cast<int>(hots.size()), K, 0.0);
    for (std::size_t m = 0; m < hots.size(); ++m) u(static_cast<int>(m), hots[m]) = scale;
    return u;
}

}  // namespace

TEST_CASE("single deterministic cluster always answers one thing") {
    auto p = params_for(one_hot_rows({0}, 2), 1, 2);
    Matrix cent(1, 1, 1.0);
    auto model = model_with_centroids(cent);

    CHECK(exact_subjectivity(0, model, p) == doctest::Approx(1.0).epsilon(1e-9));
    auto mc = mc_subjectivity(0, model, p, 2000, 9);
    CHECK(mc.value == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(mc.stderr_ == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("two clusters with opposite deterministic answers disagree always") {
    auto p = params_for(one_hot_rows({0, 1}, 2), 1, 2);
    Matrix cent(2, 2, 0.0);
    cent(0, 0) = 1.0;
    cent(1, 1) = 1.0;
    auto model = model_with_centroids(cent);

    CHECK(exact_subjectivity(0, model, p) == doctest::Approx(2.0).epsilon(1e-9));
    auto mc = mc_subjectivity(0, model, p, 2000, 10);
    CHECK(mc.value == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("two fair-coin clusters give expected distinct answers 1.5") {
    // uniform perceived truth: all products equal
    Matrix u(1, 2, 0.0);
    auto p = params_for(u, 1, 2);
    Matrix cent(2, 1, 1.0);
    auto model = model_with_centroids(cent);

    CHECK(exact_subjectivity(0, model, p) == doctest::Approx(1.5).epsilon(1e-12));

    auto mc = mc_subjectivity(0, model, p, 50000, 3);
    CHECK(std::abs(mc.value - 1.5) <= 4.0 * mc.stderr_);
    CHECK(mc.stderr_ > 0.0);
    CHECK(mc.stderr_ == doctest::Approx(0.5 / std::sqrt(50000.0)).epsilon(0.05));
}

TEST_CASE("exact enumeration matches the inclusion-exclusion closed form") {
    Rng rng(307);
    for (int rep = 0; rep < 25; ++rep) {
        int K = 2 + static_cast<int>(rng.uniform_below(3));
        int C = 1 + static_cast<int>(rng.uniform_below(4));
        int M = 1 + static_cast<int>(rng.uniform_below(3));
        SdrParams p;
        p.e = {1.0};
        p.d = {rng.normal(0, 1)};
        p.u = Matrix(M, K);
        p.v = Matrix(1, K);
        for (auto& x : p.u.data()) x = rng.normal(0, 2);
        for (auto& x : p.v.data()) x = rng.normal(0, 2);

        ClusterModel model;
        model.C = C;
        model.centroids = Matrix(C, M);
        for (int c = 0; c < C; ++c) {
            auto row = rng.dirichlet(std::vector<double>(M, 1.0));
            for (int m = 0; m < M; ++m) model.centroids(c, m) = row[m];
        }
        model.assignment = {0};
        model.sizes.assign(C, 0);
        model.sizes[0] = 1;

        double got = exact_subjectivity(0, model, p);
        double want = distinct_by_linearity(0, model, p);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
        CHECK(got >= 1.0 - 1e-12);
        CHECK(got <= std::min(K, C) + 1e-12);
    }
}

TEST_CASE("monte carlo agrees with exact within sampling error") {
    Rng rng(311);
    for (int rep = 0; rep < 5; ++rep) {
        int K = 3, C = 3, M = 2;
        SdrParams p;
        p.e = {1.0};
        p.d = {0.5};
        p.u = Matrix(M, K);
        p.v = Matrix(1, K);
        for (auto& x : p.u.data()) x = rng.normal(0, 1.5);
        for (auto& x : p.v.data()) x = rng.normal(0, 1.5);

        ClusterModel model;
        model.C = C;
        model.centroids = Matrix(C, M);
        for (int c = 0; c < C; ++c) {
            auto row = rng.dirichlet(std::vector<double>(M, 1.0));
            for (int m = 0; m < M; ++m) model.centroids(c, m) = row[m];
        }
        model.assignment = {0};
        model.sizes.assign(C, 0);
        model.sizes[0] = 1;

        double exact = exact_subjectivity(0, model, p);
        auto mc = mc_subjectivity(0, model, p, 50000, 700 + rep);
        CHECK(std::abs(mc.value - exact) <= 4.0 * mc.stderr_ + 1e-9);
        CHECK(mc.T == 50000);
    }
}

TEST_CASE("monte carlo is deterministic in the seed") {
    auto p = params_for(Matrix(2, 3, 0.0), 1, 3);
    Matrix cent(2, 2, 0.5);
    auto model = model_with_centroids(cent);
    auto a = mc_subjectivity(0, model, p, 10000, 55);
    auto b = mc_subjectivity(0, model, p, 10000, 55);
    CHECK(a.value == b.value);
    CHECK(a.stderr_ == b.stderr_);
    auto c = mc_subjectivity(0, model, p, 10000, 56);
    CHECK(a.value != c.value);
}

TEST_CASE("exact enumeration refuses explosive joint spaces") {
    int C = 21, K = 2;  // 2^21 outcomes
    SdrParams p;
    p.e = {1.0};
    p.d = {0.0};
    p.u = Matrix(1, K, 0.0);
    p.v = Matrix(1, K, 1.0);
    ClusterModel model;
    model.C = C;
    model.centroids = Matrix(C, 1, 1.0);
    model.assignment = {0};
    model.sizes.assign(C, 0);
    model.sizes[0] = 1;
    CHECK_THROWS_WITH_AS(exact_subjectivity(0, model, p), doctest::Contains("mc"),
                         std::runtime_error);
}

TEST_CASE("question ranking orders by value then identifier") {
    SdrParams p;
    p.e = {1.0};
    p.d = {0.1, 2.0, -1.0};
    p.u = Matrix(1, 2, 0.0);
    p.v = Matrix(3, 2, 1.0);

    std::vector<SubjectivityEstimate> subj(3);
    subj[0].value = 1.4;
    subj[1].value = 1.4;
    subj[2].value = 1.9;

    std::vector<std::string> labels = {"qb", "qa", "qc"};
    auto ranks = rank_questions(p, subj, labels);

    CHECK(ranks.difficulty_order == std::vector<int>{1, 0, 2});
    CHECK(ranks.difficulty_rank == std::vector<int>{2, 1, 3});

    // subjectivity: qc first, then the 1.4 tie broken qa before qb
    CHECK(ranks.subjectivity_order == std::vector<int>{2, 1, 0});
    CHECK(ranks.subjectivity_rank == std::vector<int>{3, 2, 1});
}

TEST_CASE("constant shifts in difficulty do not change its ranking") {
    SdrParams p;
    p.e = {1.0};
    p.d = {0.3, -0.2, 1.7, 0.9};
    p.u = Matrix(1, 2, 0.0);
    p.v = Matrix(4, 2, 1.0);
    std::vector<SubjectivityEstimate> subj(4);
    std::vector<std::string> labels = {"q1", "q2", "q3", "q4"};
    auto base = rank_questions(p, subj, labels);

    for (auto& d : p.d) d += 11.5;
    auto shifted = rank_questions(p, subj, labels);
    CHECK(base.difficulty_order == shifted.difficulty_order);
    CHECK(base.difficulty_rank == shifted.difficulty_rank);
}
