#pragma once

// Levenberg-Marquardt for small dense least-squares problems min 0.5*|r(x)|^2.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spectralmix/errors.hpp"

namespace spectralmix::numerics {

struct LmOptions {
    int max_iterations = 100;
    double initial_lambda = 1e-3;
    /// stop when |r| falls below this
    double residual_tol = 0.0;
    /// stop when the relative step is below this
    double step_tol = 1e-12;
    /// stop when the relative cost decrease of an accepted step is below this
    double cost_tol = 1e-15;
    double max_lambda = 1e16;
};

struct LmResult {
    Eigen::VectorXd x;
    Eigen::VectorXd residual;
    Eigen::MatrixXd jacobian;  // at x
    double cost = 0.0;         // 0.5*|r|^2
    int iterations = 0;
    int rejected_steps = 0;
    std::vector<double> cost_trace;  // cost after every accepted step, starting with the initial cost
    std::vector<Eigen::VectorXd> x_trace;  // accepted iterates, starting with x0
    bool converged = false;
    std::string status;
};

/// `model(x, r, J)` fills r and, when J is non-null, the Jacobian dr/dx.
/// It may throw SolverError for infeasible x, which counts as a rejected step.
template <class Model>
LmResult levenberg_marquardt(Model&& model, Eigen::VectorXd x0, const LmOptions& opt = {}) {
    LmResult res;
    res.x = std::move(x0);
    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    model(res.x, r, &J);
    double cost = 0.5 * r.squaredNorm();
    res.cost_trace.push_back(cost);
    res.x_trace.push_back(res.x);
    double lambda = opt.initial_lambda;
    const auto n = res.x.size();

    auto finish = [&](bool ok, std::string status) {
        res.residual = r;
        res.jacobian = J;
        res.cost = cost;
        res.converged = ok;
        res.status = std::move(status);
        return res;
    };

    if (n == 0) return finish(r.norm() <= opt.residual_tol || r.size() == 0, "no unknowns");

    for (int it = 0; it < opt.max_iterations; ++it) {
        res.iterations = it + 1;
        if (std::sqrt(2.0 * cost) <= opt.residual_tol) return finish(true, "residual below tolerance");
        const Eigen::MatrixXd JtJ = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;
        bool accepted = false;
        while (!accepted) {
            Eigen::MatrixXd A = JtJ;
            for (Eigen::Index i = 0; i < n; ++i) A(i, i) += lambda * std::max(JtJ(i, i), 1e-12);
            const Eigen::VectorXd step = A.ldlt().solve(-g);
            if (!step.allFinite()) {
                lambda *= 10.0;
                ++res.rejected_steps;
                if (lambda > opt.max_lambda) return finish(false, "singular normal equations");
                continue;
            }
            const Eigen::VectorXd trial = res.x + step;
            Eigen::VectorXd rt;
            Eigen::MatrixXd Jt;
            double trial_cost = std::numeric_limits<double>::infinity();
            try {
                model(trial, rt, nullptr);
                if (rt.allFinite()) trial_cost = 0.5 * rt.squaredNorm();
            } catch (const SolverError&) {
            }
            if (trial_cost < cost) {
                const double decrease = (cost - trial_cost) / std::max(cost, 1e-300);
                model(trial, rt, &Jt);
                res.x = trial;
                r = rt;
                J = Jt;
                cost = trial_cost;
                res.cost_trace.push_back(cost);
                res.x_trace.push_back(res.x);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (std::sqrt(2.0 * cost) <= opt.residual_tol) return finish(true, "residual below tolerance");
                if (step.norm() <= opt.step_tol * (1.0 + res.x.norm()))
                    return finish(opt.residual_tol <= 0.0, "step below tolerance");
                if (decrease <= opt.cost_tol) return finish(opt.residual_tol <= 0.0, "cost stagnated");
            } else {
                ++res.rejected_steps;
                lambda *= 4.0;
                if (lambda > opt.max_lambda)
                    return finish(opt.residual_tol <= 0.0, "no decrease possible");
            }
        }
    }
    return finish(false, "iteration cap reached");
}

}  // namespace spectralmix::numerics
