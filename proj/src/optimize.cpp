#include "fairlens/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace fairlens::optimize {

Result gradient_descent(const Objective& f, Eigen::VectorXd x0, const Options& opts) {
    constexpr double kArmijo = 1e-4;
    constexpr int kMaxHalvings = 60;

    Result out;
    out.x = std::move(x0);
    Eigen::VectorXd grad(out.x.size());
    out.value = f(out.x, &grad);
    out.grad_norm = grad.norm();
    out.trace.push_back(out.value);

    double step = 1.0 / std::max(1.0, out.grad_norm);
    Eigen::VectorXd x_new(out.x.size());
    Eigen::VectorXd grad_new(out.x.size());

    while (out.iterations < opts.max_iter) {
        if (out.grad_norm <= opts.tol) {
            out.converged = true;
            break;
        }
        const double g2 = grad.squaredNorm();
        double value_new = 0.0;
        bool accepted = false;
        for (int h = 0; h < kMaxHalvings; ++h) {
            x_new = out.x - step * grad;
            value_new = f(x_new, &grad_new);
            if (std::isfinite(value_new) && value_new <= out.value - kArmijo * step * g2) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Eigen::VectorXd s = x_new - out.x;
        const Eigen::VectorXd yv = grad_new - grad;
        const double sy = s.dot(yv);
        step = sy > 0.0 ? std::clamp(s.squaredNorm() / sy, 1e-12, 1e12) : step * 2.0;

        out.x.swap(x_new);
        grad.swap(grad_new);
        out.value = value_new;
        out.grad_norm = grad.norm();
        out.trace.push_back(out.value);
        ++out.iterations;
    }
    if (out.grad_norm <= opts.tol) out.converged = true;
    return out;
}

}  // namespace fairlens::optimize
