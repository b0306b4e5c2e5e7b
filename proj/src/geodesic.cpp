// SPDX-License-Identifier: Apache-2.0
#include "fracshape/geodesic.hpp"

#include "fracshape/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include <Eigen/LU>

#include "fracshape/errors.hpp"
#include "fracshape/log.hpp"

namespace fracshape {

namespace {

Eigen::VectorXd uniform_times(Index m) {
    Eigen::VectorXd t(m + 1);
    for (Index i = 0; i <= m; ++i) t[i] = static_cast<double>(i) / m;
    return t;
}

struct SegmentEval {
    double value = 0.0;
    Eigen::MatrixXd grad_a;
    Eigen::MatrixXd grad_b;
};

/// Energy (1/dt) G_{(a+b)/2}(b-a, b-a) of one time segment, with gradients.
SegmentEval segment_with_grad(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                              double dt, SobolevOrder q, int oversample) {
    SampledFunction mid(0.5 * (a + b));
    auto eval = gq_quadratic_with_grad(mid, b - a, q, oversample);
    SegmentEval out;
    out.value = eval.value / dt;
    out.grad_a = (0.5 * eval.grad_c - eval.grad_h) / dt;
    out.grad_b = (0.5 * eval.grad_c + eval.grad_h) / dt;
    return out;
}

double segment_value(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double dt,
                     SobolevOrder q, int oversample) {
    SampledFunction mid(0.5 * (a + b));
    return gq_quadratic_value(mid, b - a, q, oversample) / dt;
}

std::vector<Eigen::MatrixXd> path_positions(const PathGrid& path) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(path.curves.size());
    for (const auto& c : path.curves) out.push_back(c.position.values);
    return out;
}

}  // namespace

PathGrid make_path(const std::vector<SampledFunction>& positions,
                   bool endpoints_fixed) {
    if (positions.size() < 2) throw ConfigError("a path needs at least two slices");
    PathGrid path;
    path.endpoints_fixed = endpoints_fixed;
    path.curves.reserve(positions.size());
    for (const auto& p : positions) {
        if (p.grid_size() != positions.front().grid_size() ||
            p.dim() != positions.front().dim())
            throw ConfigError("path slices live on incompatible grids");
        path.curves.push_back(build_curve(p));
    }
    path.times = uniform_times(static_cast<Index>(positions.size()) - 1);
    return path;
}

PathGrid linear_path(const DiscreteCurve& c0, const DiscreteCurve& c1,
                     Index time_slices) {
    if (c0.grid_size() != c1.grid_size() || c0.dim() != c1.dim())
        throw ConfigError("endpoint curves live on incompatible grids");
    if (time_slices < 1) throw ConfigError("a path needs at least one segment");

    const Index n = c0.grid_size();
    const Index d = c0.dim();
    const Eigen::MatrixXd circle = circle_curve(n, 1.0, d).values;

    double lift = 0.0;
    for (int attempt = 0; attempt < 24; ++attempt) {
        std::vector<SampledFunction> slices;
        slices.reserve(time_slices + 1);
        bool ok = true;
        for (Index m = 0; m <= time_slices && ok; ++m) {
            const double t = static_cast<double>(m) / time_slices;
            Eigen::MatrixXd pos = (1.0 - t) * c0.position.values +
                                  t * c1.position.values +
                                  lift * std::sin(EIGEN_PI * t) * circle;
            try {
                slices.emplace_back(pos);
                build_curve(slices.back());
                // Midpoints of consecutive slices enter the energy; keep them
                // immersed as well.
                if (m > 0)
                    build_curve(SampledFunction(
                        0.5 * (slices[m - 1].values + slices[m].values)));
            } catch (const ImmersionViolation&) {
                ok = false;
            }
        }
        if (ok) return make_path(slices);
        lift = lift == 0.0 ? 0.01 * (c0.length + c1.length) : 2.0 * lift;
        log_debug("linear path left the immersion set; lifting with amplitude ", lift);
    }
    throw ImmersionViolation("could not lift the initial path into the immersion set");
}

double path_energy_positions(const std::vector<Eigen::MatrixXd>& positions,
                             SobolevOrder q, int oversample,
                             std::vector<Eigen::MatrixXd>* gradients) {
    const auto m = static_cast<Index>(positions.size()) - 1;
    const double dt = 1.0 / static_cast<double>(m);
    double energy = 0.0;
    if (gradients) {
        gradients->assign(
            positions.size(),
            Eigen::MatrixXd::Zero(positions[0].rows(), positions[0].cols()));
        for (Index i = 0; i < m; ++i) {
            auto seg =
                segment_with_grad(positions[i], positions[i + 1], dt, q, oversample);
            energy += seg.value;
            (*gradients)[i] += seg.grad_a;
            (*gradients)[i + 1] += seg.grad_b;
        }
    } else {
        for (Index i = 0; i < m; ++i)
            energy += segment_value(positions[i], positions[i + 1], dt, q, oversample);
    }
    return energy;
}

double path_energy(const PathGrid& path, SobolevOrder q, int oversample) {
    return path_energy_positions(path_positions(path), q, oversample, nullptr);
}

double path_length(const PathGrid& path, SobolevOrder q, int oversample) {
    const Index m = path.segments();
    double length = 0.0;
    for (Index i = 0; i < m; ++i) {
        const Eigen::MatrixXd& a = path.curves[i].position.values;
        const Eigen::MatrixXd& b = path.curves[i + 1].position.values;
        SampledFunction mid(0.5 * (a + b));
        length += std::sqrt(gq_quadratic_value(mid, b - a, q, oversample));
    }
    return length;
}

std::vector<TangentField> energy_gradient(const PathGrid& path, SobolevOrder q,
                                          int oversample) {
    std::vector<Eigen::MatrixXd> grads;
    path_energy_positions(path_positions(path), q, oversample, &grads);
    std::vector<TangentField> out;
    for (Index i = 1; i < static_cast<Index>(grads.size()) - 1; ++i)
        out.emplace_back(SampledFunction(grads[i]));
    return out;
}

std::pair<PathGrid, SolveReport> solve_bvp(const DiscreteCurve& c0,
                                           const DiscreteCurve& c1, SobolevOrder q,
                                           const SolveOptions& opts) {
    PathGrid init = linear_path(c0, c1, opts.time_slices);
    std::vector<Eigen::MatrixXd> pos = path_positions(init);
    const Index m = static_cast<Index>(pos.size()) - 1;
    const Index n = c0.grid_size();
    const Index d = c0.dim();
    const Index vars = (m - 1) * n * d;

    SolveReport report;

    auto unpack = [&](const Eigen::VectorXd& x) {
        std::vector<Eigen::MatrixXd> p = pos;
        for (Index i = 1; i < m; ++i)
            p[i] = Eigen::Map<const Eigen::MatrixXd>(x.data() + (i - 1) * n * d, n, d);
        return p;
    };
    auto eval = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) {
        auto p = unpack(x);
        std::vector<Eigen::MatrixXd> grads;
        const double e =
            path_energy_positions(p, q, opts.oversample, grad ? &grads : nullptr);
        if (grad) {
            grad->resize(vars);
            for (Index i = 1; i < m; ++i)
                grad->segment((i - 1) * n * d, n * d) =
                    Eigen::Map<const Eigen::VectorXd>(grads[i].data(), n * d);
        }
        return e;
    };

    Eigen::VectorXd x0(vars);
    for (Index i = 1; i < m; ++i)
        x0.segment((i - 1) * n * d, n * d) =
            Eigen::Map<const Eigen::VectorXd>(pos[i].data(), n * d);

    detail::LbfgsOptions lopts{opts.max_iter, opts.tol, opts.lbfgs_memory};
    auto result = detail::minimize_lbfgs(std::move(x0), eval, lopts);
    report.converged = result.converged;
    report.iterations = result.iterations;
    report.immersion_limited = result.feasibility_limited;
    const Eigen::VectorXd& x = result.x;

    std::vector<SampledFunction> slices;
    auto final_pos = unpack(x);
    slices.reserve(final_pos.size());
    for (const auto& p : final_pos) slices.emplace_back(p);
    PathGrid path = make_path(slices);

    report.energy = result.value;
    report.distance_upper_bound = path_length(path, q, opts.oversample);
    report.min_speed_along_path = path.curves.front().min_speed;
    report.min_length_along_path = path.curves.front().length;
    for (const auto& c : path.curves) {
        report.min_speed_along_path =
            std::min(report.min_speed_along_path, c.min_speed);
        report.min_length_along_path =
            std::min(report.min_length_along_path, c.length);
    }
    return {std::move(path), report};
}

PathGrid refine_path(const PathGrid& path, int factor) {
    if (factor != 2 && factor != 4)
        throw ConfigError("refinement factor must be 2 or 4");
    std::vector<SampledFunction> slices;
    for (Index i = 0; i < path.segments(); ++i) {
        const Eigen::MatrixXd& a = path.curves[i].position.values;
        const Eigen::MatrixXd& b = path.curves[i + 1].position.values;
        slices.emplace_back(a);
        slices.emplace_back(0.5 * (a + b));
    }
    slices.emplace_back(path.curves.back().position.values);
    PathGrid refined = make_path(slices, path.endpoints_fixed);
    return factor == 2 ? refined : refine_path(refined, 2);
}

PathGrid discrete_exp(const DiscreteCurve& c0, const TangentField& h0, SobolevOrder q,
                      Index steps, int oversample) {
    if (q.value < 1.0)
        throw DomainError("discrete exponential requires q >= 1, got " +
                          std::to_string(q.value));
    if (steps < 2) throw ConfigError("discrete exponential needs at least 2 steps");
    if (h0.field.grid_size() != c0.grid_size() || h0.field.dim() != c0.dim())
        throw ConfigError("initial velocity grid incompatible with curve");

    const Index n = c0.grid_size();
    const Index d = c0.dim();
    const double dt = 1.0 / static_cast<double>(steps);

    std::vector<Eigen::MatrixXd> traj;
    traj.reserve(steps + 1);
    traj.push_back(c0.position.values);
    traj.push_back(c0.position.values + dt * h0.field.values);
    build_curve(SampledFunction(traj.back()));

    auto residual = [&](const Eigen::MatrixXd& prev, const Eigen::MatrixXd& cur,
                        const Eigen::MatrixXd& next) {
        auto left = segment_with_grad(prev, cur, dt, q, oversample);
        auto right = segment_with_grad(cur, next, dt, q, oversample);
        return Eigen::MatrixXd(left.grad_b + right.grad_a);
    };

    for (Index m = 1; m < steps; ++m) {
        const Eigen::MatrixXd& prev = traj[m - 1];
        const Eigen::MatrixXd& cur = traj[m];
        Eigen::MatrixXd next = 2.0 * cur - prev;  // leapfrog initial guess

        Eigen::MatrixXd res = residual(prev, cur, next);
        const double scale = std::max(1.0, res.norm());
        bool done = false;
        Eigen::MatrixXd jac(n * d, n * d);
        bool have_jac = false;
        for (int newton = 0; newton < 30; ++newton) {
            if (res.norm() <= 1e-10 * scale) {
                done = true;
                break;
            }
            if (!have_jac || newton % 5 == 4) {
                const double delta = 1e-6 * std::max(1.0, next.norm());
                for (Index col = 0; col < n * d; ++col) {
                    Eigen::MatrixXd pert = next;
                    pert(col % n, col / n) += delta;
                    Eigen::MatrixXd rp = residual(prev, cur, pert);
                    Eigen::MatrixXd diff = rp - res;
                    jac.col(col) =
                        Eigen::Map<const Eigen::VectorXd>(diff.data(), n * d) / delta;
                }
                have_jac = true;
            }
            Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(res.data(), n * d);
            Eigen::VectorXd delta_x = jac.partialPivLu().solve(rhs);
            next += Eigen::Map<const Eigen::MatrixXd>(delta_x.data(), n, d);
            res = residual(prev, cur, next);
        }
        if (!done && res.norm() > 1e-10 * scale)
            throw InnerSolveFailure("variational step " + std::to_string(m) +
                                    " stalled with residual " +
                                    std::to_string(res.norm()));
        build_curve(SampledFunction(next));  // immersion check, throws on blow-up
        traj.push_back(next);
    }

    std::vector<SampledFunction> slices;
    slices.reserve(traj.size());
    for (auto& p : traj) slices.emplace_back(p);
    return make_path(slices, false);
}

}  // namespace fracshape
