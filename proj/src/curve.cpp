// SPDX-License-Identifier: Apache-2.0
#include "fracshape/curve.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "fracshape/errors.hpp"

namespace fracshape {

namespace {

constexpr double kTwoPi = 2.0 * EIGEN_PI;

Eigen::VectorXd uniform_nodes(Index n) {
    Eigen::VectorXd nodes(n);
    for (Index j = 0; j < n; ++j) nodes[j] = static_cast<double>(j) / n;
    return nodes;
}

using detail::antiderivative_coeffs;
using detail::derivative_coeffs;

double eval_series_scalar(const Eigen::VectorXcd& coeffs, double x) {
    Eigen::VectorXd pt(1);
    pt[0] = x;
    return detail::eval_series(coeffs, pt)[0];
}

/// Bisection-safeguarded Newton for increasing f on a bracket with f(lo) <= 0 <= f(hi).
double rtsafe(const std::function<double(double)>& f,
              const std::function<double(double)>& fprime, double lo, double hi,
              double tol) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double fx = f(x);
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        const double d = fprime(x);
        double xn = d > 0.0 ? x - fx / d : 0.5 * (lo + hi);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        if (std::abs(xn - x) < tol) return xn;
        x = xn;
    }
    return x;
}

/// Min of the trig interpolant of coefficient vector over an oversampled grid.
double fine_min(const Eigen::VectorXcd& coeffs, Index factor) {
    Eigen::VectorXcd padded = detail::pad_spectrum(coeffs, coeffs.size() * factor);
    return detail::idft_raw(padded).real().minCoeff();
}

}  // namespace

DiscreteCurve build_curve(const SampledFunction& position, double eps_rel) {
    if (position.dim() < 2)
        throw ConfigError("curve positions need dimension >= 2, got " +
                          std::to_string(position.dim()));
    DiscreteCurve c;
    c.position = position;
    c.derivative = spectral_derivative(position);
    c.speed = c.derivative.values.rowwise().norm();
    c.min_speed = c.speed.minCoeff();
    c.max_speed = c.speed.maxCoeff();
    if (c.min_speed < eps_rel * c.max_speed)
        throw ImmersionViolation(
            "immersion condition |c_theta| != 0 fails: min node speed " +
            std::to_string(c.min_speed) + " below threshold " +
            std::to_string(eps_rel * c.max_speed));
    c.length = c.speed.mean();

    const Index n = position.grid_size();
    c.speed_coeffs =
        detail::dft_raw(c.speed.cast<std::complex<double>>()) / static_cast<double>(n);
    if (fine_min(c.speed_coeffs, 4) <= 0.0)
        throw ImmersionViolation("speed interpolant vanishes between nodes");

    const Eigen::VectorXd big_v =
        detail::idft_raw(antiderivative_coeffs(c.speed_coeffs)).real();
    c.psi.resize(n);
    for (Index j = 0; j < n; ++j)
        c.psi[j] = static_cast<double>(j) / n + (big_v[j] - big_v[0]) / c.length;

    c.psi_inverse = eval_psi_inverse(c, uniform_nodes(n));
    c.psi_inverse[0] = 0.0;
    return c;
}

TangentField ds_derivative(const DiscreteCurve& c, const TangentField& h) {
    if (h.field.grid_size() != c.grid_size() || h.field.dim() != c.dim())
        throw ConfigError("tangent field grid incompatible with curve");
    SampledFunction dh = spectral_derivative(h.field);
    Eigen::MatrixXd out = dh.values.array().colwise() / c.speed.array();
    return TangentField(SampledFunction(std::move(out)));
}

DiscreteCurve to_constant_speed(const DiscreteCurve& c) {
    Eigen::MatrixXd resampled = trig_interpolate(c.position, c.psi_inverse);
    return build_curve(SampledFunction(std::move(resampled)));
}

double diameter(const DiscreteCurve& c, int oversample) {
    Eigen::MatrixXd pts = oversample > 1
                              ? resample(c.position, c.grid_size() * oversample).values
                              : c.position.values;
    const Index p = pts.rows();
    double best = 0.0;
    for (Index i = 0; i < p; ++i)
        for (Index j = i + 1; j < p; ++j)
            best = std::max(best, (pts.row(i) - pts.row(j)).squaredNorm());
    return std::sqrt(best);
}

SampledFunction srv_transform(const DiscreteCurve& c) {
    Eigen::MatrixXd out =
        c.derivative.values.array().colwise() / c.speed.array().sqrt();
    return SampledFunction(std::move(out));
}

DiscreteCurve random_curve(std::uint64_t seed, const RandomCurveSpec& spec) {
    if (!(spec.decay > 1.0)) throw ConfigError("random curve decay must be > 1");
    if (spec.d < 2) throw ConfigError("random curve dimension must be >= 2");
    const Index max_mode = spec.max_mode > 0 ? spec.max_mode : spec.n / 8;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::VectorXd nodes = uniform_nodes(spec.n);

    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::MatrixXd pos = Eigen::MatrixXd::Zero(spec.n, spec.d);
        for (Index j = 0; j < spec.n; ++j) {
            pos(j, 0) = spec.base_radius * std::cos(kTwoPi * nodes[j]);
            pos(j, 1) = spec.base_radius * std::sin(kTwoPi * nodes[j]);
        }
        for (Index k = 0; k < spec.d; ++k) {
            for (Index m = 2; m <= max_mode; ++m) {
                const double scale =
                    spec.amplitude / std::pow(static_cast<double>(m), spec.decay);
                const double a = scale * gauss(rng);
                const double b = scale * gauss(rng);
                for (Index j = 0; j < spec.n; ++j) {
                    const double t = kTwoPi * static_cast<double>(m) * nodes[j];
                    pos(j, k) += a * std::cos(t) + b * std::sin(t);
                }
            }
        }
        try {
            DiscreteCurve c = build_curve(SampledFunction(std::move(pos)));
            if (c.min_speed >= spec.min_speed) return c;
        } catch (const ImmersionViolation&) {
        }
    }
    throw GenerationFailure("no immersed curve with min speed " +
                            std::to_string(spec.min_speed) + " after 100 draws");
}

DiffeoSample make_diffeo(const Eigen::VectorXd& lifted_values) {
    const Index n = lifted_values.size();
    if (!is_power_of_two(n) || n < 8)
        throw ConfigError("diffeo grid size must be a power of two >= 8");
    DiffeoSample phi;
    phi.values = lifted_values;
    Eigen::VectorXd periodic(n);
    for (Index j = 0; j < n; ++j)
        periodic[j] = lifted_values[j] - static_cast<double>(j) / n;
    phi.periodic_coeffs =
        detail::dft_raw(periodic.cast<std::complex<double>>()) / static_cast<double>(n);

    Eigen::VectorXcd dcoeffs = derivative_coeffs(phi.periodic_coeffs);
    phi.derivative =
        detail::idft_raw(dcoeffs).real().array() + 1.0;

    for (Index j = 0; j + 1 < n; ++j)
        if (phi.values[j + 1] <= phi.values[j])
            throw ConfigError("diffeomorphism samples must be strictly increasing");
    Eigen::VectorXcd one = Eigen::VectorXcd::Zero(n);
    one[0] = 1.0;
    if (fine_min(dcoeffs + one, 8) <= 0.0)
        throw ConfigError("diffeomorphism derivative must stay positive");
    return phi;
}

DiffeoSample identity_diffeo(Index n) { return make_diffeo(uniform_nodes(n)); }

DiffeoSample random_diffeo(std::uint64_t seed, const RandomDiffeoSpec& spec) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const Eigen::VectorXd nodes = uniform_nodes(spec.n);

    for (int attempt = 0; attempt < 100; ++attempt) {
        Eigen::VectorXd values = nodes;
        // Mode scale amplitude / (2 pi m^2) keeps the derivative perturbation
        // O(amplitude), so moderate amplitudes rarely need rejection.
        for (Index m = 1; m <= spec.max_mode; ++m) {
            const double scale = spec.amplitude / (kTwoPi * static_cast<double>(m * m));
            const double a = scale * gauss(rng);
            const double b = scale * gauss(rng);
            for (Index j = 0; j < spec.n; ++j) {
                const double t = kTwoPi * static_cast<double>(m) * nodes[j];
                values[j] += a * std::cos(t) + b * std::sin(t);
            }
        }
        try {
            DiffeoSample phi = make_diffeo(values);
            Eigen::VectorXcd dcoeffs = derivative_coeffs(phi.periodic_coeffs);
            Eigen::VectorXcd one = Eigen::VectorXcd::Zero(spec.n);
            one[0] = 1.0;
            if (fine_min(dcoeffs + one, 8) >= spec.min_slope) return phi;
        } catch (const ConfigError&) {
        }
    }
    throw GenerationFailure("no diffeomorphism with slope >= " +
                            std::to_string(spec.min_slope) + " after 100 draws");
}

double eval_diffeo(const DiffeoSample& phi, double theta) {
    const double shift = std::floor(theta);
    const double x = theta - shift;
    return shift + x + eval_series_scalar(phi.periodic_coeffs, x);
}

Eigen::VectorXd eval_diffeo(const DiffeoSample& phi, const Eigen::VectorXd& thetas) {
    Eigen::VectorXd out(thetas.size());
    Eigen::VectorXd frac(thetas.size());
    for (Index i = 0; i < thetas.size(); ++i) frac[i] = thetas[i] - std::floor(thetas[i]);
    Eigen::VectorXd periodic = detail::eval_series(phi.periodic_coeffs, frac);
    for (Index i = 0; i < thetas.size(); ++i) out[i] = thetas[i] + periodic[i];
    return out;
}

DiffeoSample invert_diffeo(const DiffeoSample& phi) {
    const Index n = phi.grid_size();
    Eigen::VectorXd periodic(n);
    for (Index j = 0; j < n; ++j)
        periodic[j] = phi.values[j] - static_cast<double>(j) / n;
    const double pad_hi = periodic.maxCoeff() + 1.0;
    const double pad_lo = periodic.minCoeff() - 1.0;
    const Eigen::VectorXcd dcoeffs = derivative_coeffs(phi.periodic_coeffs);

    Eigen::VectorXd inv(n);
    for (Index j = 0; j < n; ++j) {
        const double target = static_cast<double>(j) / n;
        auto f = [&](double x) { return eval_diffeo(phi, x) - target; };
        auto fp = [&](double x) {
            const double frac = x - std::floor(x);
            return 1.0 + eval_series_scalar(dcoeffs, frac);
        };
        inv[j] = rtsafe(f, fp, target - pad_hi, target - pad_lo, 1e-12);
    }
    return make_diffeo(inv);
}

SampledFunction compose_function(const SampledFunction& f, const DiffeoSample& phi,
                                 Index target_n) {
    const Index nt = target_n > 0 ? target_n : f.grid_size();
    Eigen::VectorXd pts;
    if (nt == phi.grid_size()) {
        pts = phi.values;
    } else {
        pts = eval_diffeo(phi, uniform_nodes(nt));
    }
    return SampledFunction(trig_interpolate(f, pts));
}

DiscreteCurve compose_curve(const DiscreteCurve& c, const DiffeoSample& phi,
                            Index target_n) {
    return build_curve(compose_function(c.position, phi, target_n));
}

double eval_psi(const DiscreteCurve& c, double theta) {
    const double shift = std::floor(theta);
    const double x = theta - shift;
    const Eigen::VectorXcd anti = antiderivative_coeffs(c.speed_coeffs);
    const double v = eval_series_scalar(anti, x);
    const double v0 = eval_series_scalar(anti, 0.0);
    return shift + x + (v - v0) / c.length;
}

double eval_psi_inverse(const DiscreteCurve& c, double u) {
    Eigen::VectorXd one(1);
    one[0] = u;
    return eval_psi_inverse(c, one)[0];
}

Eigen::VectorXd eval_psi_inverse(const DiscreteCurve& c, const Eigen::VectorXd& us) {
    const Index n = c.grid_size();
    const Eigen::VectorXcd anti = antiderivative_coeffs(c.speed_coeffs);
    const double v0 = eval_series_scalar(anti, 0.0);
    auto psi_at = [&](double x) {
        return x + (eval_series_scalar(anti, x) - v0) / c.length;
    };
    auto psi_prime = [&](double x) {
        return eval_series_scalar(c.speed_coeffs, x) / c.length;
    };

    Eigen::VectorXd out(us.size());
    for (Index i = 0; i < us.size(); ++i) {
        const double shift = std::floor(us[i]);
        const double u = us[i] - shift;
        // Bracket from the cached node values of psi.
        Index k = 0;
        for (Index j = 1; j < n; ++j) {
            if (c.psi[j] <= u)
                k = j;
            else
                break;
        }
        const double lo = static_cast<double>(k) / n;
        const double hi = k + 1 < n ? static_cast<double>(k + 1) / n : 1.0;
        auto f = [&](double x) { return psi_at(x) - u; };
        out[i] = shift + rtsafe(f, psi_prime, lo, hi, 1e-12);
    }
    return out;
}

SampledFunction circle_curve(Index n, double radius, Index d, double phase,
                             const Eigen::VectorXd& center) {
    Eigen::MatrixXd pos = Eigen::MatrixXd::Zero(n, d);
    for (Index j = 0; j < n; ++j) {
        const double t = kTwoPi * (static_cast<double>(j) / n + phase);
        pos(j, 0) = radius * std::cos(t);
        pos(j, 1) = radius * std::sin(t);
    }
    if (center.size() > 0) {
        if (center.size() != d) throw ConfigError("circle center dimension mismatch");
        pos.rowwise() += center.transpose();
    }
    return SampledFunction(std::move(pos));
}

}  // namespace fracshape
