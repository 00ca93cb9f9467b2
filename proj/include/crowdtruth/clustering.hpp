#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "crowdtruth/matrix.hpp"
#include "crowdtruth/sdr.hpp"

namespace crowdtruth {

struct ClusterModel {
    int C = 0;
    Matrix centroids;            // C x M, rows renormalized onto the simplex
    std::vector<int> assignment;  // worker index -> cluster index
    std::vector<int> sizes;       // N_c
    double inertia = 0.0;
    std::vector<double> inertia_trace;  // per Lloyd iteration of the winning run
    std::vector<std::string> warnings;
};

struct ClusterTruth {
    std::vector<Matrix> dist;            // per cluster, J x K
    std::vector<std::vector<int>> argmax;  // C x J
};

struct ElbowReport {
    std::vector<double> cv_error;  // index c-1 holds the score for c clusters
    int folds_used = 0;
    int selected = 0;
    std::vector<std::string> warnings;
};

enum class ClusterStrategy { largest_group, highest_expertise };

// Lloyd with k-means++ seeding; several internally derived restarts keep
// the best inertia so a fixed seed cannot get stuck with one bad draw.
ClusterModel kmeans(const PreferencePosterior& phi_hat, int C, std::uint64_t seed,
                    int restarts = 10, int max_iterations = 300);

// 10-fold cross-validated elbow rule: pick the smallest cluster count
// whose successor improves held-out error by less than `threshold`.
ElbowReport elbow_select(const PreferencePosterior& phi_hat, int c_max, int folds,
                         std::uint64_t seed, double threshold = 0.10);

ClusterTruth cluster_truth(const ClusterModel& model, const SdrParams& params);

int select_cluster(const ClusterModel& model, const SdrParams& params, ClusterStrategy strategy);

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);

void export_clusters_csv(const ClusterModel& model, const ResponseMatrix& data,
                         const std::filesystem::path& path);
void export_elbow_json(const ElbowReport& report, const std::filesystem::path& path);

}  // namespace crowdtruth
