#include "crowdtruth/sdr.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "crowdtruth/link.hpp"
#include "crowdtruth/numeric.hpp"

namespace crowdtruth {

SdrHyperParams SdrHyperParams::with_m(int m) {
    SdrHyperParams hp;
    hp.M = m;
    hp.alpha.assign(static_cast<std::size_t>(m), 1.0);
    return hp;
}

void SdrHyperParams::validate() const {
    if (M < 1) throw std::invalid_argument("hyperparams: M must be >= 1");
    if (static_cast<int>(alpha.size()) != M)
        throw std::invalid_argument("hyperparams: alpha length must equal M");
    for (double a : alpha)
        if (!(a > 0.0)) throw std::invalid_argument("hyperparams: alpha components must be > 0");
    for (double v : {sigma2_e, sigma2_d, sigma2_u, sigma2_v})
        if (!(v > 0.0)) throw std::invalid_argument("hyperparams: variances must be > 0");
}

std::size_t SdrParams::flat_size() const {
    return e.size() + d.size() + u.data().size() + v.data().size();
}

std::vector<double> SdrParams::pack() const {
    std::vector<double> x;
    x.reserve(flat_size());
    x.insert(x.end(), e.begin(), e.end());
    x.insert(x.end(), d.begin(), d.end());
    x.insert(x.end(), u.data().begin(), u.data().end());
    x.insert(x.end(), v.data().begin(), v.data().end());
    return x;
}

void SdrParams::unpack(std::span<const double> x) {
    if (x.size() != flat_size()) throw std::invalid_argument("unpack: size mismatch");
    std::size_t off = 0;
    std::copy(x.begin() + off, x.begin() + off + e.size(), e.begin());
    off += e.size();
    std::copy(x.begin() + off, x.begin() + off + d.size(), d.begin());
    off += d.size();
    std::copy(x.begin() + off, x.begin() + off + u.data().size(), u.data().begin());
    off += u.data().size();
    std::copy(x.begin() + off, x.begin() + off + v.data().size(), v.data().begin());
}

GibbsState GibbsState::from_assignments(const ResponseMatrix& data, std::vector<int> z, int M) {
    if (z.size() != data.triplets.size())
        throw std::invalid_argument("gibbs state: one assignment per response required");
    GibbsState state;
    state.z = std::move(z);
    state.counts.assign(data.worker_count(), std::vector<int>(M, 0));
    for (std::size_t t = 0; t < state.z.size(); ++t) {
        int m = state.z[t];
        if (m < 0 || m >= M) throw std::invalid_argument("gibbs state: assignment out of range");
        ++state.counts[data.triplets[t].worker][m];
    }
    return state;
}

void GibbsState::check_consistent(const ResponseMatrix& data) const {
    auto rebuilt = from_assignments(data, z, static_cast<int>(counts.at(0).size()));
    if (rebuilt.counts != counts) throw std::runtime_error("gibbs state: counts out of sync with z");
}

double logistic_correct_prob(double e, double d) {
    return link_correct_prob(CorrectnessLink::shift, e, d);
}

std::vector<double> truth_softmax(std::span<const double> u_m, std::span<const double> v_j) {
    if (u_m.size() != v_j.size()) throw std::invalid_argument("truth_softmax: length mismatch");
    std::vector<double> probs(u_m.size());
    for (std::size_t k = 0; k < probs.size(); ++k) probs[k] = u_m[k] * v_j[k];
    softmax_inplace(probs);
    return probs;
}

double response_marginal(const SdrParams& params, int i, int j, int m, int r) {
    const int K = params.u.cols();
    auto psi = truth_softmax(params.u.row(m), params.v.row(j));
    double f = logistic_correct_prob(params.e[i], params.d[j]);
    double miss = (1.0 - f) / (K - 1);
    double total = 0.0;
    for (int k = 0; k < K; ++k) total += psi[k] * (k == r ? f : miss);
    return total;
}

std::vector<double> gibbs_conditional(const ResponseMatrix& data, int t, const GibbsState& state,
                                      const SdrParams& params, const SdrHyperParams& hp) {
    const auto& resp = data.triplets[t];
    const auto& counts_i = state.counts[resp.worker];

    double alpha_total = 0.0;
    int n_i = 0;
    for (int m = 0; m < hp.M; ++m) {
        alpha_total += hp.alpha[m];
        n_i += counts_i[m];
    }
    double denom = (n_i - 1) + alpha_total;

    std::vector<double> probs(hp.M);
    double total = 0.0;
    for (int m = 0; m < hp.M; ++m) {
        int held = counts_i[m] - (state.z[t] == m ? 1 : 0);
        probs[m] = response_marginal(params, resp.worker, resp.question, m, resp.option) *
                   (held + hp.alpha[m]) / denom;
        total += probs[m];
    }
    for (double& p : probs) p /= total;
    return probs;
}

int gibbs_step(const ResponseMatrix& data, int t, GibbsState& state, const SdrParams& params,
               const SdrHyperParams& hp, Rng& rng) {
    auto probs = gibbs_conditional(data, t, state, params, hp);
    int m = rng.discrete(probs);
    int i = data.triplets[t].worker;
    --state.counts[i][state.z[t]];
    ++state.counts[i][m];
    state.z[t] = m;
    return m;
}

namespace {

struct QGradient {
    std::vector<double> e, d;
    std::vector<double> u, v;  // row-major, aliased onto Matrix layouts
};

// Shared evaluation of the negative log joint and, when grad != nullptr,
// its gradient. All response terms go through log-sum-exp so extreme
// (e - d) gaps cannot underflow the mixture.
double q_core(const SdrParams& params, const std::vector<int>& z, const ResponseMatrix& data,
              const SdrHyperParams& hp, QGradient* grad) {
    const int K = params.u.cols();
    const double log_miss_share = std::log(static_cast<double>(K - 1));

    double value = 0.0;
    std::vector<double> logits(K), log_psi(K), log_terms(K);

    for (std::size_t t = 0; t < data.triplets.size(); ++t) {
        const auto& resp = data.triplets[t];
        const int i = resp.worker, j = resp.question, r = resp.option, m = z[t];

        auto u_m = params.u.row(m);
        auto v_j = params.v.row(j);
        for (int k = 0; k < K; ++k) logits[k] = u_m[k] * v_j[k];
        double lse = log_sum_exp(logits);
        for (int k = 0; k < K; ++k) log_psi[k] = logits[k] - lse;

        double a = params.e[i] - params.d[j];
        double log_f = -softplus(-a);
        double log_1mf = -softplus(a);
        for (int k = 0; k < K; ++k)
            log_terms[k] = log_psi[k] + (k == r ? log_f : log_1mf - log_miss_share);
        double log_s = log_sum_exp(log_terms);
        value -= log_s;

        if (grad) {
            double f = sigmoid(a);
            double w_r = std::exp(log_terms[r] - log_s);
            grad->e[i] += f - w_r;
            grad->d[j] += w_r - f;
            double* gu = grad->u.data() + static_cast<std::size_t>(m) * K;
            double* gv = grad->v.data() + static_cast<std::size_t>(j) * K;
            for (int k = 0; k < K; ++k) {
                double pull = std::exp(log_psi[k]) - std::exp(log_terms[k] - log_s);
                gu[k] += pull * v_j[k];
                gv[k] += pull * u_m[k];
            }
        }
    }

    auto prior = [&](const double* xs, std::size_t n, double mu, double sigma2, double* gs) {
        for (std::size_t p = 0; p < n; ++p) {
            value += normal_neg_log_pdf(xs[p], mu, sigma2);
            if (gs) gs[p] += (xs[p] - mu) / sigma2;
        }
    };
    prior(params.e.data(), params.e.size(), hp.mu_e, hp.sigma2_e, grad ? grad->e.data() : nullptr);
    prior(params.d.data(), params.d.size(), hp.mu_d, hp.sigma2_d, grad ? grad->d.data() : nullptr);
    prior(params.u.data().data(), params.u.data().size(), hp.mu_u, hp.sigma2_u,
          grad ? grad->u.data() : nullptr);
    prior(params.v.data().data(), params.v.data().size(), hp.mu_v, hp.sigma2_v,
          grad ? grad->v.data() : nullptr);
    return value;
}

void check_grad_finite(const QGradient& g, int K) {
    auto scan = [](const std::vector<double>& xs, const std::string& name, int cols) {
        for (std::size_t p = 0; p < xs.size(); ++p)
            if (!std::isfinite(xs[p])) {
                std::string where = cols > 0 ? "[" + std::to_string(p / cols) + "][" +
                                                   std::to_string(p % cols) + "]"
                                             : "[" + std::to_string(p) + "]";
                throw std::runtime_error("gradient_q: component " + name + where + " is not finite");
            }
    };
    scan(g.e, "e", 0);
    scan(g.d, "d", 0);
    scan(g.u, "u", K);
    scan(g.v, "v", K);
}

}  // namespace

double objective_q(const SdrParams& params, const GibbsState& state, const ResponseMatrix& data,
                   const SdrHyperParams& hp) {
    double value = q_core(params, state.z, data, hp, nullptr);
    if (!std::isfinite(value)) throw std::runtime_error("objective_q: value is not finite");
    return value;
}

std::vector<double> gradient_q(const SdrParams& params, const GibbsState& state,
                               const ResponseMatrix& data, const SdrHyperParams& hp) {
    QGradient g;
    g.e.assign(params.e.size(), 0.0);
    g.d.assign(params.d.size(), 0.0);
    g.u.assign(params.u.data().size(), 0.0);
    g.v.assign(params.v.data().size(), 0.0);
    q_core(params, state.z, data, hp, &g);
    check_grad_finite(g, params.u.cols());

    std::vector<double> flat;
    flat.reserve(params.flat_size());
    flat.insert(flat.end(), g.e.begin(), g.e.end());
    flat.insert(flat.end(), g.d.begin(), g.d.end());
    flat.insert(flat.end(), g.u.begin(), g.u.end());
    flat.insert(flat.end(), g.v.begin(), g.v.end());
    return flat;
}

SdrFit fit_sdr(const ResponseMatrix& data, const SdrHyperParams& hp, const FitSchedule& schedule,
               std::uint64_t seed) {
    hp.validate();
    if (schedule.outer_iterations <= schedule.burn_in || schedule.burn_in < 0)
        throw std::invalid_argument("fit: need burn_in in [0, outer_iterations)");

    const int I = data.worker_count(), J = data.question_count(), K = data.option_count();

    SdrFit fit;
    fit.params.e.resize(I);
    fit.params.d.resize(J);
    fit.params.u = Matrix(hp.M, K);
    fit.params.v = Matrix(J, K);

    Rng init_rng(derive_seed(seed, "sdr/init"));
    for (auto& x : fit.params.e) x = init_rng.normal(hp.mu_e, 0.01 * std::sqrt(hp.sigma2_e));
    for (auto& x : fit.params.d) x = init_rng.normal(hp.mu_d, 0.01 * std::sqrt(hp.sigma2_d));
    for (auto& x : fit.params.u.data()) x = init_rng.normal(hp.mu_u, 0.01 * std::sqrt(hp.sigma2_u));
    for (auto& x : fit.params.v.data()) x = init_rng.normal(hp.mu_v, 0.01 * std::sqrt(hp.sigma2_v));

    Rng z_rng(derive_seed(seed, "sdr/z-init"));
    std::vector<int> z0(data.triplets.size());
    for (auto& m : z0) m = static_cast<int>(z_rng.uniform_below(hp.M));
    GibbsState state = GibbsState::from_assignments(data, std::move(z0), hp.M);

    ObjectiveFunction objective;
    objective.dimension = fit.params.flat_size();
    SdrParams scratch = fit.params;
    objective.evaluate = [&](std::span<const double> x, std::span<double> grad_out) {
        scratch.unpack(x);
        double value = objective_q(scratch, state, data, hp);
        auto g = gradient_q(scratch, state, data, hp);
        std::copy(g.begin(), g.end(), grad_out.begin());
        return value;
    };

    Rng gibbs_rng(derive_seed(seed, "sdr/gibbs"));
    std::vector<std::vector<double>> count_sums(I, std::vector<double>(hp.M, 0.0));

    for (int round = 0; round < schedule.outer_iterations; ++round) {
        for (int t = 0; t < data.response_count(); ++t)
            gibbs_step(data, t, state, fit.params, hp, gibbs_rng);
        if (round >= schedule.burn_in)
            for (int i = 0; i < I; ++i)
                for (int m = 0; m < hp.M; ++m) count_sums[i][m] += state.counts[i][m];

        SdrRound entry;
        entry.q_before = objective_q(fit.params, state, data, hp);
        MinimizeResult opt;
        try {
            opt = minimize(objective, fit.params.pack(), schedule.optimizer);
        } catch (const std::exception& ex) {
            throw std::runtime_error("fit: round " + std::to_string(round) + ": " + ex.what());
        }
        fit.params.unpack(opt.x);
        entry.q_after = opt.value;
        fit.trace.push_back(entry);
    }

    const int samples = schedule.outer_iterations - schedule.burn_in;
    double alpha_total = 0.0;
    for (double a : hp.alpha) alpha_total += a;
    fit.posterior.phi_hat = Matrix(I, hp.M);
    for (int i = 0; i < I; ++i) {
        double n_i = static_cast<double>(data.by_worker[i].size());
        for (int m = 0; m < hp.M; ++m)
            fit.posterior.phi_hat(i, m) =
                (count_sums[i][m] / samples + hp.alpha[m]) / (n_i + alpha_total);
    }
    return fit;
}

std::vector<double> predict_response(const SdrParams& params, const PreferencePosterior& posterior,
                                     int i, int j) {
    const int K = params.u.cols();
    const int M = params.u.rows();
    std::vector<double> out(K, 0.0);
    for (int m = 0; m < M; ++m) {
        double phi = posterior.phi_hat(i, m);
        for (int r = 0; r < K; ++r) out[r] += phi * response_marginal(params, i, j, m, r);
    }
    return out;
}

}  // namespace crowdtruth
