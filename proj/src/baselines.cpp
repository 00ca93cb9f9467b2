#include "crowdtruth/baselines.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "crowdtruth/link.hpp"
#include "crowdtruth/numeric.hpp"
#include "crowdtruth/optimizer.hpp"
#include "crowdtruth/rng.hpp"

namespace crowdtruth {

int argmax_lowest_tie(std::span<const double> xs) {
    int best = 0;
    for (std::size_t k = 1; k < xs.size(); ++k)
        if (xs[k] > xs[best]) best = static_cast<int>(k);
    return best;
}

namespace {

TruthEstimate estimate_from_posterior(Matrix posterior) {
    TruthEstimate est;
    est.argmax.resize(posterior.rows());
    for (int j = 0; j < posterior.rows(); ++j) est.argmax[j] = argmax_lowest_tie(posterior.row(j));
    est.posterior = std::move(posterior);
    return est;
}

}  // namespace

TruthEstimate majority_vote(const ResponseMatrix& data) {
    Matrix posterior(data.question_count(), data.option_count());
    for (int j = 0; j < data.question_count(); ++j) {
        const auto& resp = data.by_question[j];
        for (int t : resp) posterior(j, data.triplets[t].option) += 1.0;
        for (int k = 0; k < data.option_count(); ++k)
            posterior(j, k) /= static_cast<double>(resp.size());
    }
    return estimate_from_posterior(std::move(posterior));
}

namespace {

// E-step shared by GLAD and DS: per question, combine the class prior
// with per-response log kernels, normalize, and return the summed log
// marginal (the data part of the penalized likelihood).
template <typename LogKernel>
double posterior_e_step(const ResponseMatrix& data, const std::vector<double>& prior,
                        LogKernel&& log_kernel, Matrix& q) {
    const int K = data.option_count();
    double log_marginal = 0.0;
    std::vector<double> logw(K);
    for (int j = 0; j < data.question_count(); ++j) {
        for (int k = 0; k < K; ++k) logw[k] = std::log(prior[k]);
        for (int t : data.by_question[j]) {
            const auto& resp = data.triplets[t];
            for (int k = 0; k < K; ++k) logw[k] += log_kernel(resp.worker, j, k, resp.option);
        }
        double lz = log_sum_exp(logw);
        log_marginal += lz;
        for (int k = 0; k < K; ++k) q(j, k) = std::exp(logw[k] - lz);
    }
    return log_marginal;
}

}  // namespace

GladFit glad_fit(const ResponseMatrix& data, const GladPriors& priors, std::uint64_t seed) {
    const int I = data.worker_count(), J = data.question_count(), K = data.option_count();
    const double log_miss_share = std::log(static_cast<double>(K - 1));

    GladFit fit;
    fit.params.gamma = priors.gamma;
    fit.params.e.resize(I);
    fit.params.d.resize(J);
    Rng init_rng(derive_seed(seed, "glad/init"));
    for (auto& x : fit.params.e) x = init_rng.normal(priors.mu_e, 0.01 * std::sqrt(priors.sigma2_e));
    for (auto& x : fit.params.d) x = init_rng.normal(priors.mu_d, 0.01 * std::sqrt(priors.sigma2_d));

    auto mv = majority_vote(data);
    fit.params.theta.assign(K, 0.0);
    for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) fit.params.theta[k] += mv.posterior(j, k);
    for (int k = 0; k < K; ++k)
        fit.params.theta[k] = (fit.params.theta[k] + priors.gamma) / (J + K * priors.gamma);

    auto log_kernel = [&](int i, int j, int k, int r) {
        double a = link_activation(CorrectnessLink::damp, fit.params.e[i], fit.params.d[j]);
        return k == r ? -softplus(-a) : -softplus(a) - log_miss_share;
    };

    auto penalty = [&]() {
        double p = 0.0;
        for (int k = 0; k < K; ++k) p += priors.gamma * std::log(fit.params.theta[k]);
        for (double x : fit.params.e) p -= normal_neg_log_pdf(x, priors.mu_e, priors.sigma2_e);
        for (double x : fit.params.d) p -= normal_neg_log_pdf(x, priors.mu_d, priors.sigma2_d);
        return p;
    };

    Matrix q(J, K);

    // Expected negative penalized complete log-likelihood in (e, d);
    // theta terms are constant here and handled in closed form.
    ObjectiveFunction objective;
    objective.dimension = static_cast<std::size_t>(I + J);
    objective.evaluate = [&](std::span<const double> x, std::span<double> grad) {
        std::span<const double> e = x.subspan(0, I), d = x.subspan(I, J);
        std::fill(grad.begin(), grad.end(), 0.0);
        double value = 0.0;
        for (const auto& resp : data.triplets) {
            const int i = resp.worker, j = resp.question, r = resp.option;
            double a = link_activation(CorrectnessLink::damp, e[i], d[j]);
            double c = q(j, r);
            value -= c * (-softplus(-a)) + (1.0 - c) * (-softplus(a) - log_miss_share);
            double da_de, da_dd;
            link_activation_partials(CorrectnessLink::damp, e[i], d[j], &da_de, &da_dd);
            double slope = sigmoid(a) - c;
            grad[i] += slope * da_de;
            grad[I + j] += slope * da_dd;
        }
        for (int i = 0; i < I; ++i) {
            value += normal_neg_log_pdf(e[i], priors.mu_e, priors.sigma2_e);
            grad[i] += (e[i] - priors.mu_e) / priors.sigma2_e;
        }
        for (int j = 0; j < J; ++j) {
            value += normal_neg_log_pdf(d[j], priors.mu_d, priors.sigma2_d);
            grad[I + j] += (d[j] - priors.mu_d) / priors.sigma2_d;
        }
        return value;
    };

    double prev = 0.0;
    for (int round = 0; round <= priors.max_rounds; ++round) {
        double f = posterior_e_step(data, fit.params.theta, log_kernel, q) + penalty();
        fit.trace.push_back(f);
        if (round > 0 && f - prev < priors.tolerance) break;
        prev = f;
        if (round == priors.max_rounds) break;

        for (int k = 0; k < K; ++k) fit.params.theta[k] = 0.0;
        for (int j = 0; j < J; ++j)
            for (int k = 0; k < K; ++k) fit.params.theta[k] += q(j, k);
        for (int k = 0; k < K; ++k)
            fit.params.theta[k] = (fit.params.theta[k] + priors.gamma) / (J + K * priors.gamma);

        std::vector<double> x0;
        x0.reserve(objective.dimension);
        x0.insert(x0.end(), fit.params.e.begin(), fit.params.e.end());
        x0.insert(x0.end(), fit.params.d.begin(), fit.params.d.end());
        auto opt = minimize(objective, x0);
        std::copy(opt.x.begin(), opt.x.begin() + I, fit.params.e.begin());
        std::copy(opt.x.begin() + I, opt.x.end(), fit.params.d.begin());
    }

    posterior_e_step(data, fit.params.theta, log_kernel, q);
    fit.truth = estimate_from_posterior(std::move(q));
    return fit;
}

DsFit ds_fit(const ResponseMatrix& data, double smoothing, std::uint64_t seed) {
    (void)seed;
    if (!(smoothing > 0.0)) throw std::invalid_argument("ds_fit: smoothing must be > 0");
    const int I = data.worker_count(), J = data.question_count(), K = data.option_count();

    DsFit fit;
    fit.params.confusion.assign(I, Matrix(K, K));
    fit.params.class_prior.assign(K, 0.0);
    Matrix q = majority_vote(data).posterior;

    auto log_kernel = [&](int i, int /*j*/, int k, int r) {
        return std::log(fit.params.confusion[i](k, r));
    };

    auto penalty = [&]() {
        double p = 0.0;
        for (int k = 0; k < K; ++k) p += smoothing * std::log(fit.params.class_prior[k]);
        for (int i = 0; i < I; ++i)
            for (int k = 0; k < K; ++k)
                for (int r = 0; r < K; ++r) p += smoothing * std::log(fit.params.confusion[i](k, r));
        return p;
    };

    auto m_step = [&]() {
        for (int k = 0; k < K; ++k) fit.params.class_prior[k] = 0.0;
        for (int j = 0; j < J; ++j)
            for (int k = 0; k < K; ++k) fit.params.class_prior[k] += q(j, k);
        for (int k = 0; k < K; ++k)
            fit.params.class_prior[k] = (fit.params.class_prior[k] + smoothing) / (J + K * smoothing);

        for (int i = 0; i < I; ++i) {
            Matrix& conf = fit.params.confusion[i];
            conf = Matrix(K, K);
            std::vector<double> row_total(K, 0.0);
            for (int t : data.by_worker[i]) {
                const auto& resp = data.triplets[t];
                for (int k = 0; k < K; ++k) {
                    conf(k, resp.option) += q(resp.question, k);
                    row_total[k] += q(resp.question, k);
                }
            }
            for (int k = 0; k < K; ++k)
                for (int r = 0; r < K; ++r)
                    conf(k, r) = (conf(k, r) + smoothing) / (row_total[k] + K * smoothing);
        }
    };

    const double tolerance = 1e-6;
    const int max_rounds = 200;
    double prev = 0.0;
    for (int round = 0; round < max_rounds; ++round) {
        m_step();
        double f = posterior_e_step(data, fit.params.class_prior, log_kernel, q) + penalty();
        fit.trace.push_back(f);
        if (round > 0 && f - prev < tolerance) break;
        prev = f;
    }

    fit.truth = estimate_from_posterior(std::move(q));
    return fit;
}

void export_truth_csv(const TruthEstimate& truth, const ResponseMatrix& data,
                      const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("export_truth_csv: cannot write " + path.string());
    out << "question,predicted_label,confidence\n";
    char buf[64];
    for (int j = 0; j < truth.posterior.rows(); ++j) {
        int k = truth.argmax[j];
        std::snprintf(buf, sizeof(buf), "%.12g", truth.posterior(j, k));
        out << data.questions[j] << ',' << data.options[k] << ',' << buf << '\n';
    }
}

}  // namespace crowdtruth
