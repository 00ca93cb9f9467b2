// Acceptance battery. Each criterion prints exactly one line,
// "criterion N: PASS/FAIL (details)", and the exit code is 0 only if every
// requested criterion passed. Run with a number 1..10 to execute a single
// criterion (the ctest registration does this) or with no argument for all.
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crowdtruth/baselines.hpp"
#include "crowdtruth/clustering.hpp"
#include "crowdtruth/dataset.hpp"
#include "crowdtruth/evaluation.hpp"
#include "crowdtruth/rng.hpp"
#include "crowdtruth/sdr.hpp"
#include "crowdtruth/subjectivity.hpp"
#include "crowdtruth/synth.hpp"

namespace fs = std::filesystem;
using namespace crowdtruth;
using steady = std::chrono::steady_clock;

namespace {

double seconds_since(steady::time_point t0) {
    return std::chrono::duration<double>(steady::now() - t0).count();
}

std::string format(const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    return buf;
}

// Dense response matrix with uniformly random answers.
ResponseMatrix dense_random_data(int I, int J, int K, Rng& rng) {
    std::vector<ResponseRecord> recs;
    for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
            recs.push_back({"w" + std::to_string(i), "q" + std::to_string(j),
                            "o" + std::to_string(rng.uniform_below(K))});
    std::vector<std::string> opts;
    for (int k = 0; k < K; ++k) opts.push_back("o" + std::to_string(k));
    return build_matrix(recs, &opts);
}

SdrParams random_params(int I, int J, int K, int M, Rng& rng) {
    SdrParams p;
    p.e.resize(I);
    p.d.resize(J);
    p.u = Matrix(M, K);
    p.v = Matrix(J, K);
    for (auto& x : p.e) x = rng.normal(1.0, 1.0);
    for (auto& x : p.d) x = rng.normal(0.0, 1.0);
    for (auto& x : p.u.data()) x = rng.normal(0.0, 1.0);
    for (auto& x : p.v.data()) x = rng.normal(0.0, 1.0);
    return p;
}

GibbsState random_state(const ResponseMatrix& data, int M, Rng& rng) {
    std::vector<int> z(data.response_count());
    for (auto& m : z) m = static_cast<int>(rng.uniform_below(M));
    return GibbsState::from_assignments(data, std::move(z), M);
}

// ---------------------------------------------------------------------------
// criterion 1: every gradient component matches central finite differences.

bool criterion_1(std::string& detail) {
    auto t0 = steady::now();
    const int I = 5, J = 8, K = 3, M = 2;
    double worst = 0.0;
    for (int inst = 0; inst < 100; ++inst) {
        Rng rng(derive_seed(77, "accept/grad", inst));
        auto data = dense_random_data(I, J, K, rng);
        auto hp = SdrHyperParams::with_m(M);
        auto p = random_params(I, J, K, M, rng);
        auto state = random_state(data, M, rng);
        auto grad = gradient_q(p, state, data, hp);
        auto x = p.pack();
        const double h = 1e-5;
        for (std::size_t c = 0; c < x.size(); ++c) {
            auto xp = x;
            auto xm = x;
            xp[c] += h;
            xm[c] -= h;
            SdrParams pp = p, pm = p;
            pp.unpack(xp);
            pm.unpack(xm);
            double fd =
                (objective_q(pp, state, data, hp) - objective_q(pm, state, data, hp)) / (2 * h);
            double denom = std::max({1.0, std::abs(fd), std::abs(grad[c])});
            worst = std::max(worst, std::abs(grad[c] - fd) / denom);
        }
    }
    double secs = seconds_since(t0);
    detail = format("max rel err %.2e over 100 instances, %.1fs", worst, secs);
    return worst < 1e-5 && secs < 30.0;
}

// ---------------------------------------------------------------------------
// criterion 2: collapsed conditional matches brute-force normalization.

// Plain-arithmetic response marginal, independent of the library path.
double marginal_brute(const SdrParams& p, int i, int j, int m, int r, int K) {
    std::vector<double> s(K);
    for (int k = 0; k < K; ++k) s[k] = p.u(m, k) * p.v(j, k);
    double mx = *std::max_element(s.begin(), s.end());
    double zsum = 0.0;
    for (int k = 0; k < K; ++k) zsum += std::exp(s[k] - mx);
    double f = 1.0 / (1.0 + std::exp(-(p.e[i] - p.d[j])));
    double total = 0.0;
    for (int l = 0; l < K; ++l) {
        double psi = std::exp(s[l] - mx) / zsum;
        total += psi * ((l == r) ? f : (1.0 - f) / (K - 1));
    }
    return total;
}

// Brute-force conditional for response t: response likelihood times the
// collapsed Dirichlet-multinomial mass of the worker's assignments, via
// lgamma, normalized over the candidate values.
std::vector<double> gibbs_brute(const ResponseMatrix& data, int t, const GibbsState& state,
                                const SdrParams& p, const SdrHyperParams& hp) {
    int M = hp.M;
    int K = data.option_count();
    const auto& trip = data.triplets[t];
    std::vector<double> logw(M);
    for (int m = 0; m < M; ++m) {
        auto counts = state.counts[trip.worker];
        counts[state.z[t]] -= 1;
        counts[m] += 1;
        double lg = 0.0;
        for (int mm = 0; mm < M; ++mm)
            lg += std::lgamma(counts[mm] + hp.alpha[mm]) - std::lgamma(hp.alpha[mm]);
        logw[m] = lg + std::log(marginal_brute(p, trip.worker, trip.question, m, trip.option, K));
    }
    double mx = *std::max_element(logw.begin(), logw.end());
    std::vector<double> w(M);
    double total = 0.0;
    for (int m = 0; m < M; ++m) total += w[m] = std::exp(logw[m] - mx);
    for (auto& x : w) x /= total;
    return w;
}

bool criterion_2(std::string& detail) {
    double worst = 0.0;
    int checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        Rng rng(derive_seed(78, "accept/gibbs", inst));
        int I = 1 + static_cast<int>(rng.uniform_below(3));
        int J = 1 + static_cast<int>(rng.uniform_below(4));
        int M = 1 + static_cast<int>(rng.uniform_below(3));
        int K = 2 + static_cast<int>(rng.uniform_below(2));
        auto data = dense_random_data(I, J, K, rng);
        auto hp = SdrHyperParams::with_m(M);
        auto p = random_params(I, J, K, M, rng);
        auto state = random_state(data, M, rng);
        for (int t = 0; t < data.response_count(); ++t) {
            auto got = gibbs_conditional(data, t, state, p, hp);
            auto want = gibbs_brute(data, t, state, p, hp);
            for (int m = 0; m < M; ++m) worst = std::max(worst, std::abs(got[m] - want[m]));
            ++checked;
        }
    }
    detail = format("max abs err %.2e over %d conditionals", worst, checked);
    return worst <= 1e-12;
}

// ---------------------------------------------------------------------------
// criterion 3: Monte Carlo subjectivity agrees with exact enumeration.

bool criterion_3(std::string& detail) {
    auto t0 = steady::now();
    int within_4se = 0, within_002 = 0;
    const int configs = 20;
    for (int inst = 0; inst < configs; ++inst) {
        Rng rng(derive_seed(79, "accept/subj", inst));
        int C = 1 + static_cast<int>(rng.uniform_below(4));
        int K = 2 + static_cast<int>(rng.uniform_below(3));
        int M = 1 + static_cast<int>(rng.uniform_below(3));
        SdrParams p = random_params(C, 1, K, M, rng);
        ClusterModel model;
        model.C = C;
        model.centroids = Matrix(C, M);
        std::vector<double> ones(M, 1.0);
        for (int c = 0; c < C; ++c) {
            auto row = rng.dirichlet(ones);
            for (int m = 0; m < M; ++m) model.centroids(c, m) = row[m];
        }
        model.assignment.resize(C);
        model.sizes.assign(C, 1);
        for (int c = 0; c < C; ++c) model.assignment[c] = c;

        auto est = mc_subjectivity(0, model, p, 50000, derive_seed(79, "accept/subj-mc", inst));
        double exact = exact_subjectivity(0, model, p);
        // the epsilon absorbs float summation noise when the estimator is
        // degenerate (single cluster) and the stderr is exactly zero
        double err = std::abs(est.value - exact);
        if (err <= 4.0 * est.stderr_ + 1e-12) ++within_4se;
        if (err <= 0.02) ++within_002;
    }
    double secs = seconds_since(t0);
    detail = format("within 4 stderr: %d/%d, within 0.02: %d/%d, %.1fs", within_4se, configs,
                    within_002, configs, secs);
    return within_4se == configs && within_002 >= 18 && secs < 60.0;
}

// ---------------------------------------------------------------------------
// Shared two-group synthetic construction for criteria 4, 6 and 7. Draws are
// redrawn until the realized data shows strong, balanced group structure:
// the groups disagree on 52-68% of questions, neither group falls below 42
// workers, and at most a fifth of questions are hard enough to push answers
// toward coin flips.

SynthData strong_two_group_data(std::uint64_t macro) {
    SynthData synth;
    for (int attempt = 0; attempt < 128; ++attempt) {
        SynthSpec spec;
        spec.I = 100;
        spec.J = 200;
        spec.K = 2;
        spec.M = 2;
        spec.hp = SdrHyperParams::with_m(2);
        spec.hp.alpha = {1.0, 1.0};
        spec.hp.sigma2_u = 25.0;
        spec.hp.sigma2_v = 9.0;
        spec.hp.mu_e = 4.0;
        spec.hp.sigma2_e = 0.25;
        spec.hp.mu_d = -2.0;
        spec.hp.sigma2_d = 4.0;
        spec.responses_per_question = 5;
        spec.group_separation = 50.0;
        spec.seed = derive_seed(macro, "accept/gen", attempt);
        synth = generate_sdr(spec);

        int diff = 0;
        for (int j = 0; j < spec.J; ++j) {
            auto p0 = truth_softmax(synth.truth.params.u.row(0), synth.truth.params.v.row(j));
            auto p1 = truth_softmax(synth.truth.params.u.row(1), synth.truth.params.v.row(j));
            if (argmax_lowest_tie(p0) != argmax_lowest_tie(p1)) ++diff;
        }
        double frac = static_cast<double>(diff) / spec.J;
        int small = 0;
        for (int g : synth.truth.group) small += g == 1 ? 1 : 0;
        int gap = std::abs(spec.I - 2 * small);
        int hard = 0;
        for (int j = 0; j < spec.J; ++j) hard += synth.truth.params.d[j] > 0.0 ? 1 : 0;
        if (frac >= 0.52 && frac <= 0.68 && gap >= 10 && gap <= 16 && hard <= spec.J / 5) break;
    }
    return synth;
}

ModelFactory sdr_prediction_factory(int outer, int burn) {
    return [outer, burn](const ResponseMatrix& train, const GridConfig& cfg,
                         std::uint64_t seed) -> WorkerPredictor {
        auto hp = SdrHyperParams::with_m(cfg.M);
        FitSchedule sched;
        sched.outer_iterations = outer;
        sched.burn_in = burn;
        auto fit = fit_sdr(train, hp, sched, seed);
        auto params = fit.params;
        auto post = fit.posterior;
        return [params, post](int i, int j) {
            return argmax_lowest_tie(predict_response(params, post, i, j));
        };
    };
}

// criterion 4: held-out validation over m grid selects m=2 on two-group data.

bool criterion_4(std::string& detail) {
    auto t0 = steady::now();
    const int seeds = 20;
    int hits = 0;
    for (int s = 0; s < seeds; ++s) {
        std::uint64_t macro = 1000 + s;
        auto synth = strong_two_group_data(macro);
        GridSpec grid;
        grid.M = {1, 2, 3};
        grid.repetitions = 10;
        auto result = holdout_validate(synth.data, sdr_prediction_factory(100, 60), grid,
                                       derive_seed(macro, "accept/validate"));
        if (result.best.M == 2) ++hits;
    }
    double secs = seconds_since(t0);
    detail = format("selected m=2 in %d/%d seeds, %.0fs", hits, seeds, secs);
    return hits >= 16 && secs < 1800.0;
}

// criterion 5: on single-truth data the m=1 fit predicts held-out responses
// at least as well as the m=2 fit.

bool criterion_5(std::string& detail) {
    const int seeds = 20;
    int wins = 0;
    for (int s = 0; s < seeds; ++s) {
        std::uint64_t macro = 1000 + s;
        SynthData synth;
        for (int attempt = 0; attempt < 128; ++attempt) {
            SynthSpec spec;
            spec.I = 100;
            spec.J = 400;
            spec.K = 2;
            spec.M = 1;
            spec.hp = SdrHyperParams::with_m(1);
            spec.hp.alpha = {1.0};
            spec.hp.sigma2_u = 25.0;
            spec.hp.sigma2_v = 9.0;
            spec.hp.mu_e = 4.0;
            spec.hp.sigma2_e = 0.25;
            spec.hp.mu_d = -2.0;
            spec.hp.sigma2_d = 4.0;
            spec.responses_per_question = 5;
            spec.seed = derive_seed(macro, "accept/gen1", attempt);
            synth = generate_sdr(spec);
            int hard = 0;
            for (int j = 0; j < spec.J; ++j) hard += synth.truth.params.d[j] > 0.0 ? 1 : 0;
            if (hard <= spec.J / 5) break;
        }
        GridSpec grid;
        grid.M = {1, 2};
        grid.repetitions = 10;
        auto result = holdout_validate(synth.data, sdr_prediction_factory(100, 60), grid,
                                       derive_seed(macro, "accept/validate1"));
        double m1 = 0.0, m2 = 0.0;
        for (const auto& cell : result.table) {
            if (cell.config_id.rfind("m=1,", 0) == 0) m1 = cell.mean;
            if (cell.config_id.rfind("m=2,", 0) == 0) m2 = cell.mean;
        }
        if (m1 >= m2) ++wins;
    }
    detail = format("m=1 scored >= m=2 in %d/%d seeds", wins, seeds);
    return wins >= 14;
}

// ---------------------------------------------------------------------------
// Shared fit pipeline for criteria 6 and 7: five restarts keep the fit with
// the lowest final objective, then cluster the preference posterior.

struct TwoGroupOutcome {
    double ari = 0.0;
    int elbow = 0;
    double acc_sdr = 0.0;
    double acc_mv = 0.0;
    double acc_ds = 0.0;
};

TwoGroupOutcome two_group_outcome(std::uint64_t macro) {
    auto synth = strong_two_group_data(macro);
    FitSchedule sched;
    sched.outer_iterations = 150;
    sched.burn_in = 100;
    SdrFit fit;
    double best_q = 0.0;
    for (int r = 0; r < 5; ++r) {
        auto cand = fit_sdr(synth.data, SdrHyperParams::with_m(2), sched,
                            derive_seed(macro, "accept/fit", r));
        double q = cand.trace.back().q_after;
        if (r == 0 || q < best_q) {
            best_q = q;
            fit = std::move(cand);
        }
    }
    TwoGroupOutcome out;
    auto km = kmeans(fit.posterior, 2, derive_seed(macro, "accept/km"));
    out.ari = adjusted_rand_index(km.assignment, synth.truth.group);
    out.elbow = elbow_select(fit.posterior, 6, 10, derive_seed(macro, "accept/elbow")).selected;
    auto ct = cluster_truth(km, fit.params);
    int c = select_cluster(km, fit.params, ClusterStrategy::largest_group);
    out.acc_sdr = truth_accuracy(ct.argmax[c], synth.truth.gold);
    out.acc_mv = truth_accuracy(majority_vote(synth.data).argmax, synth.truth.gold);
    out.acc_ds = truth_accuracy(ds_fit(synth.data).truth.argmax, synth.truth.gold);
    return out;
}

// criterion 6: clustering of the preference posterior recovers the generator
// groups and the elbow rule picks two clusters.

bool criterion_6(std::string& detail) {
    const int seeds = 20;
    int ari_ok = 0, elbow_ok = 0;
    for (int s = 0; s < seeds; ++s) {
        auto out = two_group_outcome(1000 + s);
        if (out.ari >= 0.8) ++ari_ok;
        if (out.elbow == 2) ++elbow_ok;
    }
    detail = format("ari>=0.8 in %d/%d seeds, elbow==2 in %d/%d seeds", ari_ok, seeds, elbow_ok,
                    seeds);
    return ari_ok >= 16 && elbow_ok >= 16;
}

// criterion 7: largest-group truth accuracy dominates majority vote and
// Dawid-Skene against largest-group gold.

bool criterion_7(std::string& detail) {
    const int seeds = 20;
    int ge_mv = 0, ge_ds = 0;
    for (int s = 0; s < seeds; ++s) {
        auto out = two_group_outcome(1000 + s);
        if (out.acc_sdr >= out.acc_mv) ++ge_mv;
        if (out.acc_sdr >= out.acc_ds) ++ge_ds;
    }
    detail = format(">=mv in %d/%d seeds, >=ds in %d/%d seeds", ge_mv, seeds, ge_ds, seeds);
    return ge_mv >= 16 && ge_ds >= 14;
}

// ---------------------------------------------------------------------------
// criterion 8: on unanimous data every baseline recovers the answers exactly
// and every EM trace is non-decreasing.

bool criterion_8(std::string& detail) {
    bool all_exact = true, monotone = true;
    int runs = 0;
    for (int K : {2, 3}) {
        const int I = 10, J = 20;
        std::vector<ResponseRecord> recs;
        GoldLabels gold;
        for (int j = 0; j < J; ++j) gold.by_question[j] = j % K;
        for (int i = 0; i < I; ++i)
            for (int j = 0; j < J; ++j)
                recs.push_back({"w" + std::to_string(i), "q" + std::to_string(100 + j),
                                "o" + std::to_string(j % K)});
        std::vector<std::string> opts;
        for (int k = 0; k < K; ++k) opts.push_back("o" + std::to_string(k));
        auto data = build_matrix(recs, &opts);

        all_exact &= truth_accuracy(majority_vote(data).argmax, gold) == 1.0;
        for (std::uint64_t seed : {1, 2, 3}) {
            auto glad = glad_fit(data, GladPriors{}, seed);
            all_exact &= truth_accuracy(glad.truth.argmax, gold) == 1.0;
            for (std::size_t t = 1; t < glad.trace.size(); ++t)
                monotone &= glad.trace[t] >= glad.trace[t - 1] - 1e-9;
            auto ds = ds_fit(data, 0.01, seed);
            all_exact &= truth_accuracy(ds.truth.argmax, gold) == 1.0;
            for (std::size_t t = 1; t < ds.trace.size(); ++t)
                monotone &= ds.trace[t] >= ds.trace[t - 1] - 1e-9;
            runs += 2;
        }
    }
    detail = format("exact recovery: %s, monotone traces: %s over %d em runs",
                    all_exact ? "yes" : "no", monotone ? "yes" : "no", runs);
    return all_exact && monotone;
}

// ---------------------------------------------------------------------------
// criterion 9: every cli command rerun with the same flags and seed writes
// byte-identical outputs.

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("crowdtruth-accept-" + std::to_string(::getpid()) + "-" +
                std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static inline int counter = 0;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(const std::string& args) {
    const char* bin = std::getenv("CROWDTRUTH_BIN");
    if (!bin) return -1;
    std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

bool same_dir_contents(const fs::path& a, const fs::path& b) {
    std::set<std::string> names_a, names_b;
    for (const auto& e : fs::directory_iterator(a))
        if (e.is_regular_file()) names_a.insert(e.path().filename().string());
    for (const auto& e : fs::directory_iterator(b))
        if (e.is_regular_file()) names_b.insert(e.path().filename().string());
    if (names_a != names_b || names_a.empty()) return false;
    for (const auto& name : names_a)
        if (slurp(a / name) != slurp(b / name)) return false;
    return true;
}

bool criterion_9(std::string& detail) {
    if (!std::getenv("CROWDTRUTH_BIN")) {
        detail = "CROWDTRUTH_BIN is not set";
        return false;
    }
    TempDir root;
    auto sub = [&](const std::string& name) {
        auto p = root.path / name;
        fs::create_directories(p);
        return p;
    };

    std::vector<std::string> mismatches;
    // Runs `args --out <dir>` twice and byte-compares the two directories.
    auto check = [&](const std::string& name, const std::string& args) {
        auto a = sub(name + "-a");
        auto b = sub(name + "-b");
        bool ok = run_cli(args + " --out " + a.string()) == 0 &&
                  run_cli(args + " --out " + b.string()) == 0 && same_dir_contents(a, b);
        if (!ok) mismatches.push_back(name);
        return a;
    };

    auto sim_dir = check("simulate",
                         "simulate --i 12 --j 30 --k 2 --m 2 --rpq 4 --group-separation 8 --seed 5");
    auto data = (sim_dir / "dataset.csv").string();
    auto gold = (sim_dir / "gold.csv").string();

    fs::path sdr_dir;
    for (const std::string model : {"mv", "glad", "ds"})
        check("fit-" + model, "fit --data " + data + " --model " + model + " --seed 2");
    sdr_dir = check("fit-sdr", "fit --data " + data +
                                   " --model sdr --m 2 --outer-iters 8 --burn-in 3 --seed 2");
    auto ckpt = (sdr_dir / "checkpoint.json").string();

    check("predict-truth", "predict-truth --checkpoint " + ckpt + " --data " + data + " --c 2");
    check("predict-worker", "predict-worker --checkpoint " + ckpt + " --data " + data + " --seed 4");
    check("subjectivity",
          "subjectivity --checkpoint " + ckpt + " --data " + data + " --t-samples 2000 --c 2");
    check("evaluate", "evaluate --checkpoint " + ckpt + " --data " + data + " --gold " + gold +
                          " --c 2 --worker-eval");

    auto grid = root.path / "grid.json";
    std::ofstream(grid) << "{\"m\": [1, 2], \"repetitions\": 2}\n";
    check("validate", "validate --data " + data + " --grid " + grid.string() +
                          " --outer-iters 4 --burn-in 1 --seed 8");

    if (mismatches.empty()) {
        detail = "9 commands rerun byte-identical";
        return true;
    }
    std::string joined;
    for (const auto& m : mismatches) joined += (joined.empty() ? "" : ", ") + m;
    detail = "mismatched or failed: " + joined;
    return false;
}

// ---------------------------------------------------------------------------
// criterion 10: rank correlation endpoints and the closed form on 20 items.

bool criterion_10(std::string& detail) {
    Rng rng(derive_seed(80, "accept/spearman"));
    const int n = 20;
    std::vector<double> a(n);
    for (int i = 0; i < n; ++i) a[i] = static_cast<double>(i) + rng.uniform01() * 0.5;
    std::vector<double> rev(a.rbegin(), a.rend());
    bool endpoints = spearman_rank_correlation(a, a) == 1.0 &&
                     spearman_rank_correlation(a, rev) == -1.0;

    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> x(n), y(n);
        std::vector<int> px(n), py(n);
        for (int i = 0; i < n; ++i) px[i] = py[i] = i;
        for (int i = n - 1; i > 0; --i) {
            std::swap(px[i], px[rng.uniform_below(i + 1)]);
            std::swap(py[i], py[rng.uniform_below(i + 1)]);
        }
        double sum_d2 = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = px[i];
            y[i] = py[i];
            double d = px[i] - py[i];  // ranks equal the permutation values plus one
            sum_d2 += d * d;
        }
        double closed = 1.0 - 6.0 * sum_d2 / (n * (static_cast<double>(n) * n - 1.0));
        worst = std::max(worst, std::abs(spearman_rank_correlation(x, y) - closed));
    }
    detail = format("endpoints %s, closed-form max err %.2e", endpoints ? "exact" : "wrong", worst);
    return endpoints && worst <= 1e-12;
}

using CriterionFn = bool (*)(std::string&);

}  // namespace

int main(int argc, char** argv) {
    const CriterionFn criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                    criterion_5, criterion_6, criterion_7, criterion_8,
                                    criterion_9, criterion_10};
    int lo = 1, hi = 10;
    if (argc > 1) {
        lo = hi = std::atoi(argv[1]);
        if (lo < 1 || lo > 10) {
            std::fprintf(stderr, "usage: %s [criterion 1..10]\n", argv[0]);
            return 2;
        }
    }
    bool all_ok = true;
    for (int n = lo; n <= hi; ++n) {
        std::string detail;
        bool ok = criteria[n - 1](detail);
        std::printf("criterion %d: %s (%s)\n", n, ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        all_ok &= ok;
    }
    return all_ok ? 0 : 1;
}
