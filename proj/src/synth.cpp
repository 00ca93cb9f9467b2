#include "crowdtruth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "crowdtruth/link.hpp"
#include "crowdtruth/rng.hpp"

namespace crowdtruth {

namespace {

std::string padded_label(const char* prefix, int index, int count) {
    int width = 1;
    for (int top = count - 1; top >= 10; top /= 10) ++width;
    std::string digits = std::to_string(index);
    return prefix + std::string(width - digits.size(), '0') + digits;
}

// Zero-padded so lexicographic label order matches index order.
std::vector<std::string> make_labels(const char* prefix, int count, int from) {
    std::vector<std::string> labels(count);
    for (int i = 0; i < count; ++i) labels[i] = padded_label(prefix, i + from, count + from);
    return labels;
}

// responses_per_question distinct workers per question; afterwards every
// worker holds at least one slot (slots are stolen from multi-slot
// workers for anyone left out).
std::vector<std::vector<int>> assign_workers(int I, int J, int rpq, Rng& rng) {
    std::vector<std::vector<int>> assigned(J);
    std::vector<int> load(I, 0), pool(I);
    for (int i = 0; i < I; ++i) pool[i] = i;
    for (int j = 0; j < J; ++j) {
        for (int n = 0; n < rpq; ++n) {
            int pick = n + static_cast<int>(rng.uniform_below(static_cast<std::size_t>(I - n)));
            std::swap(pool[n], pool[pick]);
        }
        assigned[j].assign(pool.begin(), pool.begin() + rpq);
        std::sort(assigned[j].begin(), assigned[j].end());
        for (int i : assigned[j]) ++load[i];
    }
    for (int w = 0; w < I; ++w) {
        if (load[w] > 0) continue;
        bool placed = false;
        for (int j = 0; j < J && !placed; ++j) {
            int victim = -1;
            for (std::size_t s = 0; s < assigned[j].size(); ++s)
                if (load[assigned[j][s]] >= 2 &&
                    (victim < 0 || load[assigned[j][s]] > load[assigned[j][victim]]))
                    victim = static_cast<int>(s);
            if (victim < 0) continue;
            --load[assigned[j][victim]];
            assigned[j][victim] = w;
            ++load[w];
            std::sort(assigned[j].begin(), assigned[j].end());
            placed = true;
        }
        if (!placed) throw std::runtime_error("synth: could not give every worker a response");
    }
    return assigned;
}

}  // namespace

void SynthSpec::validate() const {
    if (I < 1 || J < 1 || K < 2 || M < 1) throw std::invalid_argument("synth: need I,J >= 1, K >= 2, M >= 1");
    if (hp.M != M) throw std::invalid_argument("synth: hp.M must equal M");
    hp.validate();
    if (responses_per_question < 1 || responses_per_question > I)
        throw std::invalid_argument("synth: need 1 <= responses_per_question <= I");
    if (static_cast<long long>(J) * responses_per_question < I)
        throw std::invalid_argument("synth: not enough response slots to cover every worker");
    if (group_separation < 0.0) throw std::invalid_argument("synth: group_separation must be >= 0");
}

SynthData generate_sdr(const SynthSpec& spec) {
    spec.validate();
    const int I = spec.I, J = spec.J, K = spec.K, M = spec.M;

    SynthTruth truth;
    Rng param_rng(derive_seed(spec.seed, "synth/params"));
    truth.params.e.resize(I);
    truth.params.d.resize(J);
    truth.params.u = Matrix(M, K);
    truth.params.v = Matrix(J, K);
    for (auto& x : truth.params.e) x = param_rng.normal(spec.hp.mu_e, std::sqrt(spec.hp.sigma2_e));
    for (auto& x : truth.params.d) x = param_rng.normal(spec.hp.mu_d, std::sqrt(spec.hp.sigma2_d));
    for (auto& x : truth.params.u.data())
        x = param_rng.normal(spec.hp.mu_u, std::sqrt(spec.hp.sigma2_u));
    for (auto& x : truth.params.v.data())
        x = param_rng.normal(spec.hp.mu_v, std::sqrt(spec.hp.sigma2_v));

    Rng phi_rng(derive_seed(spec.seed, "synth/phi"));
    truth.phi = Matrix(I, M);
    truth.group.resize(I);
    for (int i = 0; i < I; ++i) {
        auto raw = phi_rng.dirichlet(spec.hp.alpha);
        truth.group[i] = argmax_lowest_tie(raw);
        raw[truth.group[i]] += spec.group_separation;
        double total = 1.0 + spec.group_separation;
        for (int m = 0; m < M; ++m) truth.phi(i, m) = raw[m] / total;
    }

    Rng assign_rng(derive_seed(spec.seed, "synth/assign"));
    auto assigned = assign_workers(I, J, spec.responses_per_question, assign_rng);

    auto workers = make_labels("w", I, 1);
    auto questions = make_labels("q", J, 1);
    auto options = make_labels("opt", K, 0);

    Rng response_rng(derive_seed(spec.seed, "synth/responses"));
    std::vector<ResponseRecord> records;
    for (int j = 0; j < J; ++j) {
        for (int i : assigned[j]) {
            int z = response_rng.discrete(truth.phi.row(i));
            auto psi = truth_softmax(truth.params.u.row(z), truth.params.v.row(j));
            int l = response_rng.discrete(psi);
            double f = logistic_correct_prob(truth.params.e[i], truth.params.d[j]);
            int r = l;
            if (response_rng.uniform01() >= f) {
                int shift = 1 + static_cast<int>(response_rng.uniform_below(K - 1));
                r = (l + shift) % K;
            }
            truth.z.push_back(z);
            truth.perceived.push_back(l);
            records.push_back({workers[i], questions[j], options[r]});
        }
    }

    SynthData out;
    out.data = build_matrix(records, &options);

    // The matrix indexes workers by first appearance; remap the
    // worker-indexed truth onto that order so index i means the same
    // worker on both sides.
    std::vector<double> e(I);
    Matrix phi(I, M);
    std::vector<int> group(I);
    for (int g = 0; g < I; ++g) {
        int i = out.data.worker_index(workers[g]);
        e[i] = truth.params.e[g];
        group[i] = truth.group[g];
        for (int m = 0; m < M; ++m) phi(i, m) = truth.phi(g, m);
    }
    truth.params.e = std::move(e);
    truth.phi = std::move(phi);
    truth.group = std::move(group);

    std::vector<int> group_sizes(M, 0);
    for (int g : truth.group) ++group_sizes[g];
    int largest = 0;
    for (int m = 1; m < M; ++m)
        if (group_sizes[m] > group_sizes[largest]) largest = m;
    for (int j = 0; j < J; ++j) {
        auto psi = truth_softmax(truth.params.u.row(largest), truth.params.v.row(j));
        truth.gold.by_question[j] = argmax_lowest_tie(psi);
    }

    out.truth = std::move(truth);
    return out;
}

GladSynthData generate_glad(int I, int J, int K, const GladSynthPriors& priors, std::uint64_t seed,
                            int responses_per_question) {
    if (I < 1 || J < 1 || K < 2) throw std::invalid_argument("synth: need I,J >= 1 and K >= 2");
    if (responses_per_question < 0 || responses_per_question > I)
        throw std::invalid_argument("synth: need 0 <= responses_per_question <= I");

    GladSynthData out;
    Rng param_rng(derive_seed(seed, "glad-synth/params"));
    out.e.resize(I);
    out.d.resize(J);
    for (auto& x : out.e) x = param_rng.normal(priors.mu_e, std::sqrt(priors.sigma2_e));
    for (auto& x : out.d) x = param_rng.normal(priors.mu_d, std::sqrt(priors.sigma2_d));

    Rng theta_rng(derive_seed(seed, "glad-synth/theta"));
    std::vector<double> gamma_vec(K, priors.gamma);
    out.theta = theta_rng.dirichlet(gamma_vec);

    Rng label_rng(derive_seed(seed, "glad-synth/labels"));
    std::vector<int> labels(J);
    for (auto& l : labels) l = label_rng.discrete(out.theta);

    std::vector<std::vector<int>> assigned;
    if (responses_per_question == 0) {
        assigned.assign(J, {});
        for (int j = 0; j < J; ++j)
            for (int i = 0; i < I; ++i) assigned[j].push_back(i);
    } else {
        if (static_cast<long long>(J) * responses_per_question < I)
            throw std::invalid_argument("synth: not enough response slots to cover every worker");
        Rng assign_rng(derive_seed(seed, "glad-synth/assign"));
        assigned = assign_workers(I, J, responses_per_question, assign_rng);
    }

    auto workers = make_labels("w", I, 1);
    auto questions = make_labels("q", J, 1);
    auto options = make_labels("opt", K, 0);

    Rng response_rng(derive_seed(seed, "glad-synth/responses"));
    std::vector<ResponseRecord> records;
    for (int j = 0; j < J; ++j) {
        for (int i : assigned[j]) {
            double f = link_correct_prob(CorrectnessLink::damp, out.e[i], out.d[j]);
            int r = labels[j];
            if (response_rng.uniform01() >= f) {
                int shift = 1 + static_cast<int>(response_rng.uniform_below(K - 1));
                r = (labels[j] + shift) % K;
            }
            records.push_back({workers[i], questions[j], options[r]});
        }
    }

    out.data = build_matrix(records, &options);
    std::vector<double> e(I);
    for (int g = 0; g < I; ++g) e[out.data.worker_index(workers[g])] = out.e[g];
    out.e = std::move(e);
    for (int j = 0; j < J; ++j) out.gold.by_question[j] = labels[j];
    return out;
}

void write_synth_truth_json(const SynthTruth& truth, const ResponseMatrix& data,
                            const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["e"] = truth.params.e;
    doc["d"] = truth.params.d;
    auto matrix_rows = [](const Matrix& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int r = 0; r < m.rows(); ++r)
            rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
        return rows;
    };
    doc["u"] = matrix_rows(truth.params.u);
    doc["v"] = matrix_rows(truth.params.v);
    doc["phi"] = matrix_rows(truth.phi);
    doc["group"] = truth.group;
    doc["z"] = truth.z;
    doc["perceived"] = truth.perceived;
    nlohmann::json gold;
    for (const auto& [q, k] : truth.gold.by_question) gold[data.questions[q]] = data.options[k];
    doc["gold"] = gold;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_synth_truth_json: cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace crowdtruth
