#include "crowdtruth/optimizer.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

namespace crowdtruth {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

void check_finite(double value, std::span<const double> grad) {
    if (!std::isfinite(value)) throw std::runtime_error("minimize: objective is not finite");
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (!std::isfinite(grad[i]))
            throw std::runtime_error("minimize: gradient coordinate " + std::to_string(i) +
                                     " is not finite");
}

struct HistoryPair {
    std::vector<double> s, y;
    double rho;
};

}  // namespace

MinimizeResult minimize(const ObjectiveFunction& f, std::span<const double> x0,
                        const OptimizerConfig& cfg) {
    const std::size_t n = f.dimension;
    if (x0.size() != n) throw std::invalid_argument("minimize: x0 length does not match dimension");
    if (cfg.grad_tolerance <= 0.0) throw std::invalid_argument("minimize: grad_tolerance must be > 0");

    MinimizeResult res;
    res.x.assign(x0.begin(), x0.end());
    std::vector<double> grad(n), new_x(n), new_grad(n), dir(n);
    res.value = f.evaluate(res.x, grad);
    check_finite(res.value, grad);

    std::deque<HistoryPair> history;

    for (res.iterations = 0; res.iterations < cfg.max_iterations; ++res.iterations) {
        if (inf_norm(grad) <= cfg.grad_tolerance) {
            res.converged = true;
            return res;
        }

        // Two-loop recursion; with empty history this is steepest descent.
        for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
        if (!history.empty()) {
            std::vector<double> alpha(history.size());
            for (std::size_t h = history.size(); h-- > 0;) {
                const auto& p = history[h];
                alpha[h] = p.rho * dot(p.s, dir);
                for (std::size_t i = 0; i < n; ++i) dir[i] -= alpha[h] * p.y[i];
            }
            const auto& last = history.back();
            double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            for (std::size_t i = 0; i < n; ++i) dir[i] *= gamma;
            for (std::size_t h = 0; h < history.size(); ++h) {
                const auto& p = history[h];
                double beta = p.rho * dot(p.y, dir);
                for (std::size_t i = 0; i < n; ++i) dir[i] += (alpha[h] - beta) * p.s[i];
            }
        }

        double slope = dot(grad, dir);
        if (slope >= 0.0) {
            // Stale curvature made the direction non-descending; restart.
            history.clear();
            for (std::size_t i = 0; i < n; ++i) dir[i] = -grad[i];
            slope = dot(grad, dir);
        }

        double g2 = std::sqrt(dot(grad, grad));
        double t = history.empty() ? std::min(1.0, 1.0 / g2) : 1.0;
        double new_value = res.value;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t i = 0; i < n; ++i) new_x[i] = res.x[i] + t * dir[i];
            new_value = f.evaluate(new_x, new_grad);
            check_finite(new_value, new_grad);
            if (new_value <= res.value + cfg.armijo_c * t * slope) {
                accepted = true;
                break;
            }
            t *= cfg.backtrack_factor;
        }
        if (!accepted) return res;  // step underflow, best point so far

        if (cfg.memory > 0) {
            HistoryPair p;
            p.s.resize(n);
            p.y.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                p.s[i] = new_x[i] - res.x[i];
                p.y[i] = new_grad[i] - grad[i];
            }
            double sy = dot(p.s, p.y);
            if (sy > 1e-12) {
                p.rho = 1.0 / sy;
                history.push_back(std::move(p));
                if (history.size() > cfg.memory) history.pop_front();
            }
        }
        res.x = new_x;
        res.value = new_value;
        grad = new_grad;
    }
    res.converged = inf_norm(grad) <= cfg.grad_tolerance;
    return res;
}

}  // namespace crowdtruth
