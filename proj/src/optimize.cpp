// SPDX-License-Identifier: Apache-2.0
#include "fracshape/optimize.hpp"

#include <cmath>
#include <deque>
#include <vector>

#include "fracshape/errors.hpp"

namespace fracshape::detail {

namespace {

class LbfgsDirection {
  public:
    explicit LbfgsDirection(int memory) : memory_(memory) {}

    void push(const Eigen::VectorXd& s, const Eigen::VectorXd& y) {
        const double sy = s.dot(y);
        if (sy <= 1e-12 * s.norm() * y.norm()) return;  // curvature guard
        s_.push_back(s);
        y_.push_back(y);
        rho_.push_back(1.0 / sy);
        if (static_cast<int>(s_.size()) > memory_) {
            s_.pop_front();
            y_.pop_front();
            rho_.pop_front();
        }
    }

    Eigen::VectorXd apply(const Eigen::VectorXd& grad) const {
        Eigen::VectorXd q = grad;
        const int k = static_cast<int>(s_.size());
        std::vector<double> alpha(k);
        for (int i = k - 1; i >= 0; --i) {
            alpha[i] = rho_[i] * s_[i].dot(q);
            q -= alpha[i] * y_[i];
        }
        if (k > 0) q *= s_.back().dot(y_.back()) / y_.back().squaredNorm();
        for (int i = 0; i < k; ++i) {
            const double beta = rho_[i] * y_[i].dot(q);
            q += (alpha[i] - beta) * s_[i];
        }
        return q;
    }

  private:
    int memory_;
    std::deque<Eigen::VectorXd> s_, y_;
    std::deque<double> rho_;
};

}  // namespace

LbfgsResult minimize_lbfgs(
    Eigen::VectorXd x0,
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& eval,
    const LbfgsOptions& opts) {
    LbfgsResult result;
    result.x = std::move(x0);
    if (result.x.size() == 0) {
        result.value = eval(result.x, nullptr);
        result.converged = true;
        return result;
    }

    Eigen::VectorXd grad;
    double fx = eval(result.x, &grad);
    LbfgsDirection lbfgs(opts.memory);

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if (grad.norm() <= opts.tol * (1.0 + std::abs(fx))) {
            result.converged = true;
            break;
        }
        bool accepted = false;
        bool infeasible_hit = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            Eigen::VectorXd dir =
                attempt == 0 ? Eigen::VectorXd(-lbfgs.apply(grad)) : -grad;
            double slope = dir.dot(grad);
            if (!(slope < 0.0)) {
                dir = -grad;
                slope = -grad.squaredNorm();
            }
            double step = (iter == 0 || attempt == 1)
                              ? 1.0 / std::max(1.0, grad.norm())
                              : 1.0;
            for (int back = 0; back < 40; ++back) {
                const Eigen::VectorXd trial = result.x + step * dir;
                double ftrial;
                try {
                    ftrial = eval(trial, nullptr);
                } catch (const Error&) {
                    infeasible_hit = true;
                    step *= 0.5;
                    continue;
                }
                // Sufficient decrease with a floating-point floor.
                if (ftrial <= fx + 1e-4 * step * slope + 1e-15 * std::abs(fx)) {
                    Eigen::VectorXd grad_new;
                    const double fnew = eval(trial, &grad_new);
                    lbfgs.push(step * dir, grad_new - grad);
                    result.x = trial;
                    fx = fnew;
                    grad = grad_new;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
        }
        result.iterations = iter + 1;
        if (!accepted) {
            result.feasibility_limited = infeasible_hit;
            break;
        }
    }
    if (!result.converged && grad.norm() <= opts.tol * (1.0 + std::abs(fx)))
        result.converged = true;
    result.value = fx;
    return result;
}

}  // namespace fracshape::detail
