#include "crowdtruth/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "crowdtruth/rng.hpp"

namespace crowdtruth {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

void ResponseMatrix::finalize() {
    by_worker.assign(workers.size(), {});
    by_question.assign(questions.size(), {});
    for (int t = 0; t < response_count(); ++t) {
        by_worker[triplets[t].worker].push_back(t);
        by_question[triplets[t].question].push_back(t);
    }
}

void ResponseMatrix::validate() const {
    if (option_count() < 2) throw std::runtime_error("dataset: needs at least 2 answer options");
    std::set<std::pair<int, int>> seen;
    for (const auto& t : triplets) {
        if (t.worker < 0 || t.worker >= worker_count() || t.question < 0 ||
            t.question >= question_count() || t.option < 0 || t.option >= option_count())
            throw std::runtime_error("dataset: triplet index out of bounds");
        if (!seen.insert({t.worker, t.question}).second)
            throw std::runtime_error("dataset: duplicate (worker, question) pair '" +
                                     workers[t.worker] + "," + questions[t.question] + "'");
    }
    std::vector<char> worker_seen(workers.size(), 0), question_seen(questions.size(), 0);
    for (const auto& t : triplets) {
        worker_seen[t.worker] = 1;
        question_seen[t.question] = 1;
    }
    for (std::size_t i = 0; i < worker_seen.size(); ++i)
        if (!worker_seen[i]) throw std::runtime_error("dataset: worker '" + workers[i] + "' has no responses");
    for (std::size_t j = 0; j < question_seen.size(); ++j)
        if (!question_seen[j]) throw std::runtime_error("dataset: question '" + questions[j] + "' has no responses");
}

ResponseRecord ResponseMatrix::decode(const ResponseTriplet& t) const {
    return {workers[t.worker], questions[t.question], options[t.option]};
}

namespace {
int find_label(const std::vector<std::string>& labels, const std::string& label) {
    auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}
}  // namespace

int ResponseMatrix::worker_index(const std::string& label) const { return find_label(workers, label); }
int ResponseMatrix::question_index(const std::string& label) const { return find_label(questions, label); }
int ResponseMatrix::option_index(const std::string& label) const { return find_label(options, label); }

std::uint64_t ResponseMatrix::checksum() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    };
    auto mix_int = [&](int v) { mix(std::to_string(v)); };
    mix("workers");
    for (const auto& w : workers) mix(w);
    mix("questions");
    for (const auto& q : questions) mix(q);
    mix("options");
    for (const auto& o : options) mix(o);
    mix("triplets");
    for (const auto& t : triplets) {
        mix_int(t.worker);
        mix_int(t.question);
        mix_int(t.option);
    }
    return h;
}

ResponseMatrix build_matrix(const std::vector<ResponseRecord>& records,
                            const std::vector<std::string>* explicit_options) {
    if (records.empty()) throw std::runtime_error("dataset: no responses");

    ResponseMatrix m;
    std::unordered_map<std::string, int> worker_ids, question_ids, option_ids;

    if (explicit_options) {
        for (const auto& o : *explicit_options) {
            if (!option_ids.emplace(o, static_cast<int>(m.options.size())).second)
                throw std::runtime_error("dataset: duplicate option '" + o + "' in explicit option list");
            m.options.push_back(o);
        }
    } else {
        std::set<std::string> distinct;
        for (const auto& r : records) distinct.insert(r.option);
        for (const auto& o : distinct) {
            option_ids.emplace(o, static_cast<int>(m.options.size()));
            m.options.push_back(o);
        }
    }
    if (m.options.size() < 2)
        throw std::runtime_error("dataset: needs at least 2 answer options, got " +
                                 std::to_string(m.options.size()));

    std::set<std::pair<int, int>> seen;
    for (const auto& r : records) {
        auto [wit, winserted] = worker_ids.emplace(r.worker, static_cast<int>(m.workers.size()));
        if (winserted) m.workers.push_back(r.worker);
        auto [qit, qinserted] = question_ids.emplace(r.question, static_cast<int>(m.questions.size()));
        if (qinserted) m.questions.push_back(r.question);
        auto oit = option_ids.find(r.option);
        if (oit == option_ids.end())
            throw std::runtime_error("dataset: response option '" + r.option +
                                     "' is not in the task's option set");
        if (!seen.insert({wit->second, qit->second}).second)
            throw std::runtime_error("dataset: duplicate response for (worker '" + r.worker +
                                     "', question '" + r.question + "')");
        m.triplets.push_back({wit->second, qit->second, oit->second});
    }
    m.finalize();
    m.validate();
    return m;
}

namespace {

std::vector<ResponseRecord> read_csv_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("dataset: empty file " + path.string());
    if (strip_cr(line) != "worker,question,response")
        throw std::runtime_error("dataset: expected header 'worker,question,response' in " + path.string());
    std::vector<ResponseRecord> records;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_row(line);
        if (fields.size() != 3)
            throw std::runtime_error("dataset: malformed row at " + path.string() + ":" +
                                     std::to_string(line_no));
        records.push_back({fields[0], fields[1], fields[2]});
    }
    return records;
}

std::vector<ResponseRecord> read_jsonl_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::vector<ResponseRecord> records;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error("dataset: malformed JSON at " + path.string() + ":" +
                                     std::to_string(line_no) + ": " + e.what());
        }
        if (!obj.contains("worker") || !obj.contains("question") || !obj.contains("response"))
            throw std::runtime_error("dataset: missing key at " + path.string() + ":" +
                                     std::to_string(line_no));
        records.push_back({obj["worker"].get<std::string>(), obj["question"].get<std::string>(),
                           obj["response"].get<std::string>()});
    }
    return records;
}

}  // namespace

ResponseMatrix load_responses(const std::filesystem::path& path, ResponseFormat format,
                              const std::vector<std::string>* explicit_options) {
    if (!std::filesystem::exists(path)) throw std::runtime_error("dataset not found: " + path.string());
    auto records =
        format == ResponseFormat::csv ? read_csv_records(path) : read_jsonl_records(path);
    return build_matrix(records, explicit_options);
}

void save_responses(const ResponseMatrix& matrix, const std::filesystem::path& path,
                    ResponseFormat format) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dataset: cannot write " + path.string());
    if (format == ResponseFormat::csv) {
        out << "worker,question,response\n";
        for (const auto& t : matrix.triplets) {
            auto r = matrix.decode(t);
            out << r.worker << ',' << r.question << ',' << r.option << '\n';
        }
    } else {
        for (const auto& t : matrix.triplets) {
            auto r = matrix.decode(t);
            nlohmann::json obj{{"worker", r.worker}, {"question", r.question}, {"response", r.option}};
            out << obj.dump() << '\n';
        }
    }
}

GoldLabels load_gold(const std::filesystem::path& path, const ResponseMatrix& matrix) {
    if (!std::filesystem::exists(path)) throw std::runtime_error("gold file not found: " + path.string());
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "question,label")
        throw std::runtime_error("gold file: expected header 'question,label' in " + path.string());
    GoldLabels gold;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        auto fields = split_csv_row(line);
        if (fields.size() != 2)
            throw std::runtime_error("gold file: malformed row at line " + std::to_string(line_no));
        int q = matrix.question_index(fields[0]);
        if (q < 0) throw std::runtime_error("gold file: unknown question '" + fields[0] + "'");
        int o = matrix.option_index(fields[1]);
        if (o < 0) throw std::runtime_error("gold file: unknown label '" + fields[1] + "'");
        gold.by_question[q] = o;
    }
    return gold;
}

void save_gold(const GoldLabels& gold, const ResponseMatrix& matrix,
               const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("gold file: cannot write " + path.string());
    out << "question,label\n";
    for (const auto& [q, o] : gold.by_question)
        out << matrix.questions[q] << ',' << matrix.options[o] << '\n';
}

HoldoutSplit split_holdout(const ResponseMatrix& matrix, std::uint64_t seed) {
    if (matrix.response_count() == 0) throw std::runtime_error("split_holdout: empty matrix");

    HoldoutSplit split;
    split.seed = seed;
    Rng rng(derive_seed(seed, "dataset/holdout"));

    std::vector<int> question_remaining(matrix.question_count(), 0);
    for (const auto& t : matrix.triplets) ++question_remaining[t.question];

    std::vector<char> held(matrix.triplets.size(), 0);
    for (int i = 0; i < matrix.worker_count(); ++i) {
        const auto& owned = matrix.by_worker[i];
        if (owned.size() < 2) {
            split.warnings.push_back("worker '" + matrix.workers[i] +
                                     "' has a single response; kept in train, skipped for holdout");
            continue;
        }
        // Only records whose question keeps at least one other training
        // response are eligible; picking uniformly among them is the
        // resample-until-valid rule.
        std::vector<int> eligible;
        for (int t : owned)
            if (question_remaining[matrix.triplets[t].question] >= 2) eligible.push_back(t);
        if (eligible.empty()) {
            split.warnings.push_back("worker '" + matrix.workers[i] +
                                     "' has no holdout candidate that keeps every question in train; skipped");
            continue;
        }
        int chosen = eligible[rng.uniform_below(eligible.size())];
        held[chosen] = 1;
        --question_remaining[matrix.triplets[chosen].question];
        split.heldout.push_back(matrix.decode(matrix.triplets[chosen]));
    }

    split.train.workers = matrix.workers;
    split.train.questions = matrix.questions;
    split.train.options = matrix.options;
    for (std::size_t t = 0; t < matrix.triplets.size(); ++t)
        if (!held[t]) split.train.triplets.push_back(matrix.triplets[t]);
    split.train.finalize();
    return split;
}

}  // namespace crowdtruth
