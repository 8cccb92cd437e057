#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace fairlens::optimize {

/// Returns the objective at x and writes its gradient into *grad.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct Options {
    int max_iter = 1000;
    double tol = 1e-6;  // on the gradient 2-norm
};

struct Result {
    Eigen::VectorXd x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;  // objective after each accepted step, trace[0] at x0
};

/// Batch gradient descent. Each trial step starts from the Barzilai-Borwein length
/// and is halved until the Armijo condition holds, so the objective never increases.
/// Stops on gradient norm <= tol, max_iter, or when no decreasing step exists.
[[nodiscard]] Result gradient_descent(const Objective& f, Eigen::VectorXd x0, const Options& opts);

}  // namespace fairlens::optimize
