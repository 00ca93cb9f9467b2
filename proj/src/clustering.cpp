#include "crowdtruth/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "crowdtruth/baselines.hpp"
#include "crowdtruth/rng.hpp"

namespace crowdtruth {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return acc;
}

int nearest_centroid(std::span<const double> point, const Matrix& centroids, double* dist_out) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < centroids.rows(); ++c) {
        double d = sq_dist(point, centroids.row(c));
        if (d < best_d) {
            best_d = d;
            best = c;
        }
    }
    if (dist_out) *dist_out = best_d;
    return best;
}

struct LloydRun {
    Matrix centroids;
    std::vector<int> assignment;
    double inertia = 0.0;
    std::vector<double> inertia_trace;
    std::vector<std::string> warnings;
};

LloydRun lloyd_run(const Matrix& points, int C, Rng& rng, int max_iterations) {
    const int I = points.rows(), M = points.cols();
    LloydRun run;
    run.centroids = Matrix(C, M);

    // k-means++ seeding.
    std::vector<double> d2(I, std::numeric_limits<double>::infinity());
    int first = static_cast<int>(rng.uniform_below(I));
    for (int k = 0; k < M; ++k) run.centroids(0, k) = points(first, k);
    for (int c = 1; c < C; ++c) {
        double total = 0.0;
        for (int i = 0; i < I; ++i) {
            d2[i] = std::min(d2[i], sq_dist(points.row(i), run.centroids.row(c - 1)));
            total += d2[i];
        }
        int pick = total > 0.0 ? rng.discrete(d2) : static_cast<int>(rng.uniform_below(I));
        for (int k = 0; k < M; ++k) run.centroids(c, k) = points(pick, k);
    }

    auto assign = [&]() {
        double inertia = 0.0;
        for (int i = 0; i < I; ++i) {
            double d;
            run.assignment[i] = nearest_centroid(points.row(i), run.centroids, &d);
            inertia += d;
        }
        return inertia;
    };

    run.assignment.assign(I, 0);
    run.inertia = assign();
    run.inertia_trace.push_back(run.inertia);

    std::vector<int> counts(C);
    for (int iter = 0; iter < max_iterations; ++iter) {
        std::fill(counts.begin(), counts.end(), 0);
        Matrix sums(C, M);
        for (int i = 0; i < I; ++i) {
            ++counts[run.assignment[i]];
            for (int k = 0; k < M; ++k) sums(run.assignment[i], k) += points(i, k);
        }
        for (int c = 0; c < C; ++c) {
            if (counts[c] == 0) {
                // Re-seed a starved centroid at the point farthest from
                // its current one.
                int far = 0;
                double far_d = -1.0;
                for (int i = 0; i < I; ++i) {
                    double d = sq_dist(points.row(i), run.centroids.row(run.assignment[i]));
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                for (int k = 0; k < M; ++k) run.centroids(c, k) = points(far, k);
                run.warnings.push_back("re-seeded empty cluster " + std::to_string(c));
                continue;
            }
            for (int k = 0; k < M; ++k) run.centroids(c, k) = sums(c, k) / counts[c];
        }
        auto prev = run.assignment;
        run.inertia = assign();
        run.inertia_trace.push_back(run.inertia);
        if (run.assignment == prev) break;
    }
    return run;
}

}  // namespace

ClusterModel kmeans(const PreferencePosterior& phi_hat, int C, std::uint64_t seed, int restarts,
                    int max_iterations) {
    const Matrix& points = phi_hat.phi_hat;
    const int I = points.rows(), M = points.cols();
    if (C < 1 || C > I) throw std::invalid_argument("kmeans: need 1 <= C <= worker count");
    if (restarts < 1) throw std::invalid_argument("kmeans: need at least one restart");

    LloydRun best;
    bool have = false;
    for (int r = 0; r < restarts; ++r) {
        Rng rng(derive_seed(seed, "kmeans/restart", static_cast<std::uint64_t>(r)));
        auto run = lloyd_run(points, C, rng, max_iterations);
        if (!have || run.inertia < best.inertia) {
            best = std::move(run);
            have = true;
        }
    }

    ClusterModel model;
    model.C = C;
    model.assignment = std::move(best.assignment);
    model.inertia = best.inertia;
    model.inertia_trace = std::move(best.inertia_trace);
    model.warnings = std::move(best.warnings);
    model.sizes.assign(C, 0);
    for (int a : model.assignment) ++model.sizes[a];
    model.centroids = std::move(best.centroids);
    for (int c = 0; c < C; ++c) {
        double total = 0.0;
        for (int k = 0; k < M; ++k) total += model.centroids(c, k);
        if (total > 0.0)
            for (int k = 0; k < M; ++k) model.centroids(c, k) /= total;
    }
    return model;
}

ElbowReport elbow_select(const PreferencePosterior& phi_hat, int c_max, int folds,
                         std::uint64_t seed, double threshold) {
    const Matrix& points = phi_hat.phi_hat;
    const int I = points.rows(), M = points.cols();
    if (c_max < 1) throw std::invalid_argument("elbow_select: c_max must be >= 1");
    if (folds < 2) throw std::invalid_argument("elbow_select: folds must be >= 2");

    ElbowReport report;
    report.folds_used = folds;
    if (folds > I) {
        report.folds_used = I;
        report.warnings.push_back("reduced folds from " + std::to_string(folds) + " to " +
                                  std::to_string(I) + " (one worker per fold)");
    }
    if (I < 2) {
        report.cv_error.assign(1, 0.0);
        report.selected = 1;
        report.warnings.push_back("fewer than 2 workers, elbow degenerate");
        return report;
    }

    std::vector<int> order(I);
    for (int i = 0; i < I; ++i) order[i] = i;
    Rng fold_rng(derive_seed(seed, "elbow/folds"));
    for (int i = I - 1; i > 0; --i)
        std::swap(order[i], order[fold_rng.uniform_below(static_cast<std::size_t>(i) + 1)]);

    const int F = report.folds_used;
    std::vector<std::vector<int>> fold_members(F);
    for (int i = 0; i < I; ++i) fold_members[i % F].push_back(order[i]);

    int min_train = I;
    for (const auto& members : fold_members)
        min_train = std::min(min_train, I - static_cast<int>(members.size()));
    int c_top = std::min(c_max, min_train);
    if (c_top < c_max)
        report.warnings.push_back("capped c_max at " + std::to_string(c_top) +
                                  " (training folds have only that many workers)");

    for (int C = 1; C <= c_top; ++C) {
        double fold_total = 0.0;
        for (int f = 0; f < F; ++f) {
            std::vector<char> held(I, 0);
            for (int i : fold_members[f]) held[i] = 1;
            PreferencePosterior train;
            train.phi_hat = Matrix(I - static_cast<int>(fold_members[f].size()), M);
            int row = 0;
            for (int i = 0; i < I; ++i) {
                if (held[i]) continue;
                for (int k = 0; k < M; ++k) train.phi_hat(row, k) = points(i, k);
                ++row;
            }
            auto model = kmeans(train, C,
                                derive_seed(seed, "elbow/fit",
                                            static_cast<std::uint64_t>(C) * F + f));
            double err = 0.0;
            for (int i : fold_members[f]) {
                double d;
                nearest_centroid(points.row(i), model.centroids, &d);
                err += d;
            }
            fold_total += err / static_cast<double>(fold_members[f].size());
        }
        report.cv_error.push_back(fold_total / F);
    }

    // each step's improvement is measured against the C=1 error; the floor makes
    // near-zero curves (data tighter than 0.1 squared units) read as structureless
    report.selected = c_top;
    double scale = std::max(report.cv_error[0], 0.1);
    for (int C = 2; C <= c_top; ++C) {
        double improvement = (report.cv_error[C - 2] - report.cv_error[C - 1]) / scale;
        if (improvement < threshold) {
            report.selected = C - 1;
            break;
        }
    }
    return report;
}

ClusterTruth cluster_truth(const ClusterModel& model, const SdrParams& params) {
    const int M = params.u.rows(), J = params.v.rows(), K = params.u.cols();
    if (model.centroids.cols() != M)
        throw std::invalid_argument("cluster_truth: centroid width does not match preference count");

    std::vector<Matrix> psi(M, Matrix(J, K));
    for (int m = 0; m < M; ++m)
        for (int j = 0; j < J; ++j) {
            auto probs = truth_softmax(params.u.row(m), params.v.row(j));
            for (int k = 0; k < K; ++k) psi[m](j, k) = probs[k];
        }

    ClusterTruth truth;
    truth.dist.assign(model.C, Matrix(J, K));
    truth.argmax.assign(model.C, std::vector<int>(J, 0));
    for (int c = 0; c < model.C; ++c) {
        for (int j = 0; j < J; ++j) {
            for (int m = 0; m < M; ++m) {
                double w = model.centroids(c, m);
                for (int k = 0; k < K; ++k) truth.dist[c](j, k) += w * psi[m](j, k);
            }
            truth.argmax[c][j] = argmax_lowest_tie(truth.dist[c].row(j));
        }
    }
    return truth;
}

int select_cluster(const ClusterModel& model, const SdrParams& params, ClusterStrategy strategy) {
    if (model.C < 1) throw std::invalid_argument("select_cluster: empty model");
    if (strategy == ClusterStrategy::largest_group) {
        int best = 0;
        for (int c = 1; c < model.C; ++c)
            if (model.sizes[c] > model.sizes[best]) best = c;
        return best;
    }
    int best = -1;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < model.C; ++c) {
        if (model.sizes[c] == 0) continue;
        double total = 0.0;
        for (std::size_t i = 0; i < model.assignment.size(); ++i)
            if (model.assignment[i] == c) total += params.e[i];
        double mean = total / model.sizes[c];
        if (mean > best_mean) {
            best_mean = mean;
            best = c;
        }
    }
    return best;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("adjusted_rand_index: label vectors must match and be non-empty");
    if (*std::min_element(a.begin(), a.end()) < 0 || *std::min_element(b.begin(), b.end()) < 0)
        throw std::invalid_argument("adjusted_rand_index: labels must be non-negative");
    int ka = *std::max_element(a.begin(), a.end()) + 1;
    int kb = *std::max_element(b.begin(), b.end()) + 1;
    std::vector<std::vector<long long>> table(ka, std::vector<long long>(kb, 0));
    for (std::size_t i = 0; i < a.size(); ++i) ++table[a[i]][b[i]];

    auto comb2 = [](long long n) { return 0.5 * n * (n - 1); };
    double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
    for (int r = 0; r < ka; ++r) {
        long long row = 0;
        for (int c = 0; c < kb; ++c) {
            sum_cells += comb2(table[r][c]);
            row += table[r][c];
        }
        sum_rows += comb2(row);
    }
    for (int c = 0; c < kb; ++c) {
        long long col = 0;
        for (int r = 0; r < ka; ++r) col += table[r][c];
        sum_cols += comb2(col);
    }
    double expected = sum_rows * sum_cols / comb2(static_cast<long long>(a.size()));
    double max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index == expected) return 1.0;
    return (sum_cells - expected) / (max_index - expected);
}

void export_clusters_csv(const ClusterModel& model, const ResponseMatrix& data,
                         const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_clusters_csv: cannot write " + path.string());
    out << "worker,cluster\n";
    for (std::size_t i = 0; i < model.assignment.size(); ++i)
        out << data.workers[i] << ',' << model.assignment[i] << '\n';
}

void export_elbow_json(const ElbowReport& report, const std::filesystem::path& path) {
    nlohmann::json curve = nlohmann::json::array();
    for (std::size_t c = 0; c < report.cv_error.size(); ++c)
        curve.push_back({{"clusters", c + 1}, {"cv_error", report.cv_error[c]}});
    nlohmann::json doc{{"folds", report.folds_used},
                       {"selected", report.selected},
                       {"curve", curve},
                       {"warnings", report.warnings}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_elbow_json: cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace crowdtruth
