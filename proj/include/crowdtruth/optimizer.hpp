#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace crowdtruth {

// Evaluates the objective at x and writes the gradient into grad
// (same length as x). Must be finite everywhere it gets called.
struct ObjectiveFunction {
    std::size_t dimension = 0;
    std::function<double(std::span<const double> x, std::span<double> grad)> evaluate;
};

enum class LineSearch { backtracking_armijo };

struct OptimizerConfig {
    std::size_t memory = 10;  // 0 falls back to plain gradient descent
    double grad_tolerance = 1e-5;
    std::size_t max_iterations = 500;
    LineSearch line_search = LineSearch::backtracking_armijo;
    double armijo_c = 1e-4;
    double backtrack_factor = 0.5;
};

struct MinimizeResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

// L-BFGS with Armijo backtracking. Throws on non-finite objective or
// gradient, naming the offending coordinate. Never accepts a step that
// increases the objective.
MinimizeResult minimize(const ObjectiveFunction& f, std::span<const double> x0,
                        const OptimizerConfig& cfg = {});

}  // namespace crowdtruth
