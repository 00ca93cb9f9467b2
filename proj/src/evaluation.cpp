#include "crowdtruth/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "crowdtruth/numeric.hpp"
#include "crowdtruth/parallel.hpp"
#include "crowdtruth/rng.hpp"

namespace crowdtruth {

double truth_accuracy(const std::vector<int>& predicted_argmax, const GoldLabels& gold,
                      std::vector<bool>* hits) {
    if (gold.by_question.empty()) throw std::invalid_argument("truth_accuracy: gold is empty");
    if (hits) hits->clear();
    int correct = 0;
    for (const auto& [q, label] : gold.by_question) {
        if (q < 0 || q >= static_cast<int>(predicted_argmax.size()))
            throw std::invalid_argument("truth_accuracy: gold question out of range");
        bool hit = predicted_argmax[q] == label;
        correct += hit ? 1 : 0;
        if (hits) hits->push_back(hit);
    }
    return static_cast<double>(correct) / static_cast<double>(gold.by_question.size());
}

double worker_accuracy_1mae(std::span<const int> predicted, std::span<const int> actual,
                            bool exact_match) {
    if (predicted.size() != actual.size())
        throw std::invalid_argument("worker_accuracy_1mae: prediction count mismatch");
    if (predicted.empty()) throw std::invalid_argument("worker_accuracy_1mae: nothing to score");
    double total = 0.0;
    for (std::size_t n = 0; n < predicted.size(); ++n) {
        if (exact_match)
            total += predicted[n] == actual[n] ? 0.0 : 1.0;
        else
            total += std::abs(predicted[n] - actual[n]);
    }
    return 1.0 - total / static_cast<double>(predicted.size());
}

namespace {

std::string fmt_g(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

}  // namespace

std::string GridConfig::id() const {
    return "m=" + std::to_string(M) + ",alpha_scale=" + fmt_g(alpha_scale) +
           ",mu_e=" + fmt_g(mu_e) + ",sigma2_e=" + fmt_g(sigma2_e) + ",mu_d=" + fmt_g(mu_d) +
           ",sigma2_d=" + fmt_g(sigma2_d) + ",sigma2_u=" + fmt_g(sigma2_u) +
           ",sigma2_v=" + fmt_g(sigma2_v);
}

void GridSpec::validate() const {
    if (M.empty() || alpha_scale.empty() || mu_e.empty() || sigma2_e.empty() || mu_d.empty() ||
        sigma2_d.empty() || sigma2_u.empty() || sigma2_v.empty())
        throw std::invalid_argument("grid: every hyperparameter needs at least one candidate");
    if (repetitions < 1) throw std::invalid_argument("grid: repetitions must be >= 1");
    for (int m : M)
        if (m < 1) throw std::invalid_argument("grid: M must be >= 1");
}

std::vector<GridConfig> GridSpec::expand() const {
    validate();
    std::vector<GridConfig> configs;
    for (int m : M)
        for (double as : alpha_scale)
            for (double me : mu_e)
                for (double se : sigma2_e)
                    for (double md : mu_d)
                        for (double sd : sigma2_d)
                            for (double su : sigma2_u)
                                for (double sv : sigma2_v)
                                    configs.push_back({m, as, me, se, md, sd, su, sv});
    return configs;
}

ValidationResult holdout_validate(const ResponseMatrix& data, const ModelFactory& factory,
                                  const GridSpec& grid, std::uint64_t seed, bool exact_match) {
    auto configs = grid.expand();
    const int R = grid.repetitions;

    // One split per repetition, reused by every config.
    std::vector<HoldoutSplit> splits;
    splits.reserve(R);
    for (int rep = 0; rep < R; ++rep)
        splits.push_back(split_holdout(data, derive_seed(seed, "validate/split", rep)));

    struct CellOutcome {
        std::vector<double> scores;
        bool failed = false;
        std::string error;
    };
    std::vector<CellOutcome> outcomes(configs.size() * static_cast<std::size_t>(R));

    parallel_for(outcomes.size(), [&](std::size_t cell) {
        const std::size_t ci = cell / R;
        const int rep = static_cast<int>(cell % R);
        const auto& split = splits[rep];
        auto& out = outcomes[cell];
        try {
            auto predictor = factory(split.train, configs[ci],
                                     derive_seed(seed, "validate/fit/" + configs[ci].id(), rep));
            std::vector<int> predicted, actual;
            predicted.reserve(split.heldout.size());
            for (const auto& rec : split.heldout) {
                int i = data.worker_index(rec.worker);
                int j = data.question_index(rec.question);
                predicted.push_back(predictor(i, j));
                actual.push_back(data.option_index(rec.option));
            }
            out.scores.push_back(worker_accuracy_1mae(predicted, actual, exact_match));
        } catch (const std::exception& ex) {
            out.failed = true;
            out.error = ex.what();
        }
    });

    ValidationResult result;
    result.table.resize(configs.size());
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        auto& row = result.table[ci];
        row.config_id = configs[ci].id();
        row.repetitions = R;
        std::vector<double> scores;
        for (int rep = 0; rep < R; ++rep) {
            const auto& out = outcomes[ci * R + rep];
            if (out.failed) {
                row.failed = true;
                if (row.error.empty()) row.error = out.error;
            } else {
                scores.insert(scores.end(), out.scores.begin(), out.scores.end());
            }
        }
        if (!row.failed) {
            row.mean = mean_of(scores);
            row.stddev = std::sqrt(sample_variance(scores));
        }
    }

    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        if (result.table[ci].failed) continue;
        if (result.best_index < 0) {
            result.best_index = static_cast<int>(ci);
            continue;
        }
        const auto& cur = result.table[ci];
        const auto& best = result.table[result.best_index];
        if (cur.mean > best.mean ||
            (cur.mean == best.mean && configs[ci].M < configs[result.best_index].M))
            result.best_index = static_cast<int>(ci);
    }
    if (result.best_index < 0) throw std::runtime_error("holdout_validate: every config failed");
    result.best = configs[result.best_index];
    return result;
}

namespace {

std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t pos = 0;
    while (pos < n) {
        std::size_t end = pos;
        while (end + 1 < n && values[order[end + 1]] == values[order[pos]]) ++end;
        double avg = 0.5 * (static_cast<double>(pos) + static_cast<double>(end)) + 1.0;
        for (std::size_t p = pos; p <= end; ++p) ranks[order[p]] = avg;
        pos = end + 1;
    }
    return ranks;
}

}  // namespace

double spearman_rank_correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("spearman: need two aligned samples of size >= 2");
    auto ra = average_ranks(a), rb = average_ranks(b);
    double ma = mean_of(ra), mb = mean_of(rb);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        double xa = ra[i] - ma, xb = rb[i] - mb;
        cov += xa * xb;
        va += xa * xa;
        vb += xb * xb;
    }
    if (va == 0.0 || vb == 0.0)
        throw std::invalid_argument("spearman: a ranking is constant, correlation undefined");
    return cov / std::sqrt(va * vb);
}

double spearman_rank_correlation(const std::map<std::string, double>& a,
                                 const std::map<std::string, double>& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("spearman: rankings cover different item sets");
    std::vector<double> va, vb;
    va.reserve(a.size());
    for (const auto& [item, value] : a) {
        auto it = b.find(item);
        if (it == b.end())
            throw std::invalid_argument("spearman: item '" + item + "' missing from one ranking");
        va.push_back(value);
        vb.push_back(it->second);
    }
    return spearman_rank_correlation(va, vb);
}

void export_validation_csv(const ValidationResult& result, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_validation_csv: cannot write " + path.string());
    out << "config_id,metric,mean,std,repetitions\n";
    for (const auto& row : result.table) {
        if (row.failed)
            out << '"' << row.config_id << '"' << ',' << row.metric << ",failed,failed,"
                << row.repetitions << '\n';
        else
            out << '"' << row.config_id << '"' << ',' << row.metric << ',' << fmt_g(row.mean) << ','
                << fmt_g(row.stddev) << ',' << row.repetitions << '\n';
    }
}

void export_best_config_json(const ValidationResult& result, const std::filesystem::path& path) {
    const auto& best = result.best;
    nlohmann::json doc{{"config_id", best.id()},
                       {"m", best.M},
                       {"alpha_scale", best.alpha_scale},
                       {"mu_e", best.mu_e},
                       {"sigma2_e", best.sigma2_e},
                       {"mu_d", best.mu_d},
                       {"sigma2_d", best.sigma2_d},
                       {"sigma2_u", best.sigma2_u},
                       {"sigma2_v", best.sigma2_v},
                       {"mean", result.table[result.best_index].mean},
                       {"metric", result.table[result.best_index].metric}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_best_config_json: cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

void export_metric_report_json(const MetricReport& report, const std::filesystem::path& path) {
    nlohmann::json doc{{"truth_accuracy", report.truth_accuracy},
                       {"worker_accuracy_1mae", report.worker_accuracy_1mae},
                       {"config_id", report.config_id}};
    doc["per_question_hits"] = report.per_question_hits;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_metric_report_json: cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace crowdtruth
