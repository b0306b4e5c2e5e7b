// SPDX-License-Identifier: Apache-2.0
//
// Limited-memory quasi-Newton minimizer with backtracking line search. The
// objective may throw a library Error to mark a trial point infeasible (open
// constraint sets such as the immersion condition); the line search treats
// that as a rejected step.
#pragma once

#include <functional>

#include <Eigen/Dense>

namespace fracshape::detail {

struct LbfgsOptions {
    int max_iter = 500;
    double tol = 1e-6;  // stop when |grad| <= tol * (1 + value)
    int memory = 8;
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
    bool feasibility_limited = false;  // line search stopped at the constraint
};

/// eval(x, grad): returns the objective at x and fills grad when non-null.
LbfgsResult minimize_lbfgs(
    Eigen::VectorXd x0,
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& eval,
    const LbfgsOptions& opts);

}  // namespace fracshape::detail
