#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "crowdtruth/dataset.hpp"

namespace crowdtruth {

struct MetricReport {
    double truth_accuracy = 0.0;
    double worker_accuracy_1mae = 0.0;
    std::vector<bool> per_question_hits;  // aligned with gold-labeled questions in index order
    std::string config_id;
};

// Fraction of gold-labeled questions whose prediction matches; questions
// without gold are skipped. hits, when given, receives one flag per
// gold-labeled question in question-index order.
double truth_accuracy(const std::vector<int>& predicted_argmax, const GoldLabels& gold,
                      std::vector<bool>* hits = nullptr);

// 1 - mean |pred - actual| over the integer option encoding. With
// exact_match (for nominal option sets) this is plain accuracy instead.
// The 1-MAE form can go below 0 when K > 2.
double worker_accuracy_1mae(std::span<const int> predicted, std::span<const int> actual,
                            bool exact_match = false);

struct GridConfig {
    int M = 1;
    double alpha_scale = 1.0;
    double mu_e = 1.0, sigma2_e = 1.0;
    double mu_d = 0.0, sigma2_d = 1.0;
    double sigma2_u = 1.0, sigma2_v = 1.0;
    std::string id() const;
};

struct GridSpec {
    std::vector<int> M{1};
    std::vector<double> alpha_scale{1.0};
    std::vector<double> mu_e{1.0}, sigma2_e{1.0};
    std::vector<double> mu_d{0.0}, sigma2_d{1.0};
    std::vector<double> sigma2_u{1.0}, sigma2_v{1.0};
    int repetitions = 100;

    // Cartesian product, fields varying slowest-to-fastest in the order
    // declared above. This order is also the tie-break order.
    std::vector<GridConfig> expand() const;
    void validate() const;
};

// Predicts the option index a worker would give on a question.
using WorkerPredictor = std::function<int(int worker, int question)>;

// Fits a model on the train split and returns its predictor.
using ModelFactory =
    std::function<WorkerPredictor(const ResponseMatrix& train, const GridConfig& config,
                                  std::uint64_t seed)>;

struct ValidationCell {
    std::string config_id;
    std::string metric = "worker_accuracy_1mae";
    double mean = 0.0;
    double stddev = 0.0;
    int repetitions = 0;
    bool failed = false;
    std::string error;
};

struct ValidationResult {
    std::vector<ValidationCell> table;  // one row per grid config, expansion order
    int best_index = -1;
    GridConfig best;
};

// Every config sees the same per-repetition holdout splits (split seeds
// derive only from `seed` and the repetition index). Ties go to smaller
// M, then earlier expansion order. Configs whose fit fails on any
// repetition are excluded.
ValidationResult holdout_validate(const ResponseMatrix& data, const ModelFactory& factory,
                                  const GridSpec& grid, std::uint64_t seed,
                                  bool exact_match = false);

// Spearman rank correlation with average ranks for ties.
double spearman_rank_correlation(std::span<const double> a, std::span<const double> b);
double spearman_rank_correlation(const std::map<std::string, double>& a,
                                 const std::map<std::string, double>& b);

void export_validation_csv(const ValidationResult& result, const std::filesystem::path& path);
void export_best_config_json(const ValidationResult& result, const std::filesystem::path& path);
void export_metric_report_json(const MetricReport& report, const std::filesystem::path& path);

}  // namespace crowdtruth
