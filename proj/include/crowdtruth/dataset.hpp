#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace crowdtruth {

// One crowdsourced answer: worker gave `option` as the response to `question`.
struct ResponseRecord {
    std::string worker;
    std::string question;
    std::string option;

    bool operator==(const ResponseRecord&) const = default;
};

struct ResponseTriplet {
    int worker;
    int question;
    int option;

    bool operator==(const ResponseTriplet&) const = default;
};

enum class ResponseFormat { csv, jsonl };

// Integer-encoded sparse response matrix. Option order is lexicographic over
// labels unless an explicit ordered list is supplied at load time; that order
// defines the integer encoding used by the 1-MAE metric. Immutable once built.
struct ResponseMatrix {
    std::vector<std::string> workers;
    std::vector<std::string> questions;
    std::vector<std::string> options;
    std::vector<ResponseTriplet> triplets;

    // Triplet indices grouped by worker / question, filled by finalize().
    std::vector<std::vector<int>> by_worker;
    std::vector<std::vector<int>> by_question;

    int worker_count() const { return static_cast<int>(workers.size()); }
    int question_count() const { return static_cast<int>(questions.size()); }
    int option_count() const { return static_cast<int>(options.size()); }
    int response_count() const { return static_cast<int>(triplets.size()); }

    // Rebuild by_worker / by_question from triplets.
    void finalize();

    // Check every structural invariant; throws std::runtime_error on the
    // first violation. Builders call this, and synthetic data is required
    // to pass it.
    void validate() const;

    ResponseRecord decode(const ResponseTriplet& t) const;
    // Index lookups return -1 when the label is unknown.
    int worker_index(const std::string& label) const;
    int question_index(const std::string& label) const;
    int option_index(const std::string& label) const;

    // Stable content hash over labels and triplets; used to bind model
    // checkpoints to the dataset they were fitted on.
    std::uint64_t checksum() const;
};

struct GoldLabels {
    std::map<int, int> by_question;  // question index -> option index

    bool empty() const { return by_question.empty(); }
};

struct HoldoutSplit {
    ResponseMatrix train;
    std::vector<ResponseRecord> heldout;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

// Encode raw records into a matrix. Throws on duplicate (worker, question)
// pairs, K < 2, or (with explicit_options) an option outside the list.
ResponseMatrix build_matrix(const std::vector<ResponseRecord>& records,
                            const std::vector<std::string>* explicit_options = nullptr);

ResponseMatrix load_responses(const std::filesystem::path& path, ResponseFormat format,
                              const std::vector<std::string>* explicit_options = nullptr);

void save_responses(const ResponseMatrix& matrix, const std::filesystem::path& path,
                    ResponseFormat format);

// Gold file is CSV with header `question,label`; every question must exist in
// the matrix and every label in its option set.
GoldLabels load_gold(const std::filesystem::path& path, const ResponseMatrix& matrix);
void save_gold(const GoldLabels& gold, const ResponseMatrix& matrix,
               const std::filesystem::path& path);

// Withhold one response per worker (workers with a single response are kept
// in train and skipped, with a warning). No question is ever orphaned: a
// record is only eligible for holdout while its question retains another
// training response. Deterministic for a fixed seed.
HoldoutSplit split_holdout(const ResponseMatrix& matrix, std::uint64_t seed);

}  // namespace crowdtruth
