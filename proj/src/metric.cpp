// SPDX-License-Identifier: Apache-2.0
#include "fracshape/metric.hpp"

#include <cmath>
#include <complex>

#include "fracshape/errors.hpp"

namespace fracshape {

namespace {

constexpr double kTwoPi = 2.0 * EIGEN_PI;
using Complexd = std::complex<double>;

Eigen::VectorXd fine_nodes(Index nf) {
    Eigen::VectorXd nodes(nf);
    for (Index i = 0; i < nf; ++i) nodes[i] = static_cast<double>(i) / nf;
    return nodes;
}

Index slot_frequency(Index r, Index n) { return r < n / 2 ? r : r - n; }

/// Weights (2 pi |freq|)^{2q} per FFT slot, zero at the mean and beyond the
/// cut frequency.
Eigen::VectorXd fractional_weights(Index n, double q, Index cut) {
    Eigen::VectorXd w(n);
    for (Index r = 0; r < n; ++r) {
        const double freq = static_cast<double>(slot_frequency(r, n));
        w[r] = (freq == 0.0 || std::abs(freq) > static_cast<double>(cut))
                   ? 0.0
                   : std::pow(std::pow(kTwoPi * std::abs(freq), 2), q);
    }
    return w;
}

void check_field(const DiscreteCurve& c, const TangentField& h) {
    if (h.field.grid_size() != c.grid_size() || h.field.dim() != c.dim())
        throw ConfigError("tangent field grid incompatible with curve");
}

void check_pair(const DiscreteCurve& c0, const DiscreteCurve& c1) {
    if (c0.grid_size() != c1.grid_size() || c0.dim() != c1.dim())
        throw ConfigError("curves live on incompatible grids");
}

/// Sup norm of |c0 - c1| over an oversampled grid.
double sup_distance(const DiscreteCurve& c0, const DiscreteCurve& c1, int oversample) {
    const Index m = c0.grid_size() * oversample;
    Eigen::MatrixXd a = resample(c0.position, m).values;
    Eigen::MatrixXd b = resample(c1.position, m).values;
    return (a - b).rowwise().norm().maxCoeff();
}

}  // namespace

MetricPlan::MetricPlan(const SampledFunction& position, int oversample) {
    if (oversample < 2 || !is_power_of_two(oversample))
        throw ConfigError("metric oversample factor must be a power of two >= 2");
    n_ = position.grid_size();
    d_ = position.dim();
    if (d_ < 2) throw ConfigError("curve positions need dimension >= 2");
    nf_ = n_ * oversample;

    fine_tangent_.resize(nf_, d_);
    for (Index k = 0; k < d_; ++k) {
        Eigen::VectorXcd chat =
            detail::dft_raw(position.values.col(k).cast<Complexd>()) /
            static_cast<double>(n_);
        Eigen::VectorXcd padded =
            detail::pad_spectrum(detail::derivative_coeffs(chat), nf_);
        fine_tangent_.col(k) = detail::idft_raw(padded).real();
    }
    fine_speed_ = fine_tangent_.rowwise().norm();
    const double smin = fine_speed_.minCoeff();
    const double smax = fine_speed_.maxCoeff();
    if (!(smin >= 1e-8 * smax) || smin <= 0.0)
        throw ImmersionViolation(
            "immersion condition |c_theta| != 0 fails on the evaluation grid "
            "(min speed " +
            std::to_string(smin) + ")");
    length_ = fine_speed_.mean();

    Eigen::VectorXcd shat =
        detail::dft_raw(fine_speed_.cast<Complexd>()) / static_cast<double>(nf_);
    fine_antideriv_ = detail::idft_raw(detail::antiderivative_coeffs(shat)).real();
    const Eigen::VectorXd nodes = fine_nodes(nf_);
    fine_psi_ =
        nodes.array() + (fine_antideriv_.array() - fine_antideriv_[0]) / length_;

    uniform_ = (fine_psi_ - nodes).cwiseAbs().maxCoeff() < 1e-12;
    if (!uniform_) {
        basis_.resize(nf_, nf_);
        Eigen::ArrayXcd z(nf_);
        for (Index i = 0; i < nf_; ++i) z[i] = std::polar(1.0, kTwoPi * fine_psi_[i]);
        basis_.col(0).setOnes();
        for (Index r = 1; r < nf_ / 2; ++r)
            basis_.col(r).array() = basis_.col(r - 1).array() * z;
        basis_.col(nf_ - 1).array() = z.conjugate();
        for (Index r = nf_ - 2; r >= nf_ / 2; --r)
            basis_.col(r).array() = basis_.col(r + 1).array() * z.conjugate();
    }
}

Eigen::MatrixXd MetricPlan::upsample(const Eigen::MatrixXd& h) const {
    if (nf_ == n_) return h;
    Eigen::MatrixXd out(nf_, h.cols());
    for (Index k = 0; k < h.cols(); ++k) {
        Eigen::VectorXcd hat =
            detail::dft_raw(h.col(k).cast<Complexd>()) / static_cast<double>(n_);
        out.col(k) = detail::idft_raw(detail::pad_spectrum(hat, nf_)).real();
    }
    return out;
}

Eigen::MatrixXcd MetricPlan::analysis(const Eigen::MatrixXcd& x) const {
    if (uniform_) {
        Eigen::MatrixXcd out(nf_, x.cols());
        for (Index k = 0; k < x.cols(); ++k) out.col(k) = detail::dft_raw(x.col(k));
        return out;
    }
    return basis_.adjoint() * x;
}

Eigen::MatrixXcd MetricPlan::synthesis(const Eigen::MatrixXcd& x) const {
    if (uniform_) {
        Eigen::MatrixXcd out(nf_, x.cols());
        for (Index k = 0; k < x.cols(); ++k) out.col(k) = detail::idft_raw(x.col(k));
        return out;
    }
    return basis_ * x;
}

double MetricPlan::g0(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k) const {
    const Eigen::MatrixXd hf = upsample(h);
    const Eigen::MatrixXd kf = upsample(k);
    const Eigen::VectorXd dots = (hf.array() * kf.array()).rowwise().sum();
    return dots.dot(fine_speed_) / static_cast<double>(nf_);
}

Eigen::MatrixXcd MetricPlan::pullback_coeffs(const Eigen::MatrixXd& h) const {
    const Eigen::MatrixXd hf = upsample(h);
    const Eigen::ArrayXd a = fine_speed_.array() / (length_ * static_cast<double>(nf_));
    Eigen::MatrixXcd weighted = (hf.array().colwise() * a).matrix().cast<Complexd>();
    return analysis(weighted);
}

double MetricPlan::homogeneous(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k,
                               SobolevOrder q) const {
    const Eigen::MatrixXcd gh = pullback_coeffs(h);
    const Eigen::MatrixXcd gk = (&h == &k) ? gh : pullback_coeffs(k);
    const Eigen::VectorXd w = fractional_weights(nf_, q.value, freq_cut());
    double sum = 0.0;
    for (Index r = 0; r < nf_; ++r) {
        if (w[r] == 0.0) continue;
        sum += w[r] * gh.row(r).conjugate().cwiseProduct(gk.row(r)).sum().real();
    }
    return std::pow(length_, 1.0 - 2.0 * q.value) * sum;
}

double MetricPlan::full(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k,
                        SobolevOrder q) const {
    const double base = g0(h, k);
    return q.value > 0.0 ? base + homogeneous(h, k, q) : base;
}

MetricQuadraticEval gq_quadratic_with_grad(const SampledFunction& position,
                                           const Eigen::MatrixXd& h, SobolevOrder q,
                                           int oversample) {
    const MetricPlan plan(position, oversample);
    const Index n = plan.grid_size();
    const Index d = plan.dim();
    const Index nf = plan.fine_size();
    const double l = plan.length();
    const Eigen::VectorXd& s = plan.fine_speed_;
    const Eigen::MatrixXd& tang = plan.fine_tangent_;
    const Eigen::VectorXd nodes = fine_nodes(nf);

    const Eigen::MatrixXd hf = plan.upsample(h);
    const Eigen::ArrayXd a = s.array() / (l * static_cast<double>(nf));
    const Eigen::MatrixXd ah = (hf.array().colwise() * a).matrix();
    const Eigen::MatrixXcd ghat = plan.analysis(ah.cast<Complexd>());

    MetricQuadraticEval out;
    const double g0v = hf.rowwise().squaredNorm().dot(s) / static_cast<double>(nf);

    // Reverse-mode accumulators.
    Eigen::MatrixXd grad_hf =
        (2.0 / static_cast<double>(nf)) * (hf.array().colwise() * s.array()).matrix();
    Eigen::VectorXd sbar = hf.rowwise().squaredNorm() / static_cast<double>(nf);
    double lbar = 0.0;

    double hom = 0.0;
    if (q.value > 0.0) {
        const Eigen::VectorXd w = fractional_weights(nf, q.value, plan.freq_cut());
        double hom_sum = 0.0;
        for (Index r = 0; r < nf; ++r) hom_sum += w[r] * ghat.row(r).squaredNorm();
        const double lpow = std::pow(l, 1.0 - 2.0 * q.value);
        hom = lpow * hom_sum;

        Eigen::MatrixXcd gtilde = ghat;
        for (Index r = 0; r < nf; ++r) gtilde.row(r) *= 2.0 * lpow * w[r];
        const Eigen::MatrixXd y = plan.synthesis(gtilde).real();

        grad_hf += (y.array().colwise() * a).matrix();
        const Eigen::VectorXd abar = (y.array() * hf.array()).rowwise().sum();
        sbar += abar / (l * static_cast<double>(nf));
        lbar -= abar.dot(s) / (l * l * static_cast<double>(nf));
        lbar += (1.0 - 2.0 * q.value) * hom / l;

        // Phase channel through psi.
        Eigen::MatrixXcd gtilde_n = gtilde;
        for (Index r = 0; r < nf; ++r)
            gtilde_n.row(r) *=
                Complexd(0.0, kTwoPi * static_cast<double>(slot_frequency(r, nf)));
        const Eigen::MatrixXd qsyn = plan.synthesis(gtilde_n).real();
        const Eigen::VectorXd psibar = (qsyn.array() * ah.array()).rowwise().sum();

        Eigen::VectorXd vbar = psibar / l;
        vbar[0] -= psibar.sum() / l;
        lbar -= psibar.dot(plan.fine_psi_ - nodes) / l;

        // V = Re idft(antiderivative(shat)), shat = dft(s)/nf.
        const Eigen::VectorXcd rbar = detail::dft_raw(vbar.cast<Complexd>());
        sbar -= detail::idft_raw(detail::antiderivative_coeffs(rbar)).real() /
                static_cast<double>(nf);
    }
    out.value = g0v + hom;

    // l = mean(s).
    sbar.array() += lbar / static_cast<double>(nf);

    // s_i = |t_i|.
    const Eigen::MatrixXd tbar =
        (tang.array().colwise() * (sbar.array() / s.array())).matrix();

    // Tangent channel back to node positions, and field channel back to h.
    out.grad_c.resize(n, d);
    out.grad_h.resize(n, d);
    for (Index k = 0; k < d; ++k) {
        Eigen::VectorXcd rt = detail::spectrum_adjoint_truncate(
            detail::dft_raw(tbar.col(k).cast<Complexd>()), n);
        for (Index r = 0; r < n; ++r) {
            const Index freq = slot_frequency(r, n);
            rt[r] *= freq == -n / 2 ? Complexd(0.0, 0.0)
                                    : Complexd(0.0, -kTwoPi * static_cast<double>(freq));
        }
        out.grad_c.col(k) = detail::idft_raw(rt).real() / static_cast<double>(n);

        Eigen::VectorXcd rh = detail::spectrum_adjoint_truncate(
            detail::dft_raw(grad_hf.col(k).cast<Complexd>()), n);
        out.grad_h.col(k) = detail::idft_raw(rh).real() / static_cast<double>(n);
    }
    return out;
}

double gq_quadratic_value(const SampledFunction& position, const Eigen::MatrixXd& h,
                          SobolevOrder q, int oversample) {
    const MetricPlan plan(position, oversample);
    return plan.full(h, h, q);
}

double g0(const DiscreteCurve& c, const TangentField& h, const TangentField& k) {
    check_field(c, h);
    check_field(c, k);
    const MetricPlan plan(c.position);
    return plan.g0(h.field.values, k.field.values);
}

double gq_dot(const DiscreteCurve& c, const TangentField& h, const TangentField& k,
              SobolevOrder q) {
    check_field(c, h);
    check_field(c, k);
    const MetricPlan plan(c.position);
    return plan.homogeneous(h.field.values, k.field.values, q);
}

double gq(const DiscreteCurve& c, const TangentField& h, const TangentField& k,
          SobolevOrder q) {
    check_field(c, h);
    check_field(c, k);
    const MetricPlan plan(c.position);
    return plan.full(h.field.values, k.field.values, q);
}

double metric_value(const DiscreteCurve& c, const TangentField& h,
                    const TangentField& k, const MetricParams& params) {
    return params.variant == MetricVariant::full ? gq(c, h, k, params.q)
                                                 : gq_dot(c, h, k, params.q);
}

double gq_dot_pullback(const DiscreteCurve& c, const TangentField& h, SobolevOrder q,
                       int oversample) {
    check_field(c, h);
    const Index m = c.grid_size() * oversample;
    Eigen::VectorXd targets(m);
    for (Index i = 0; i < m; ++i) targets[i] = static_cast<double>(i) / m;
    const Eigen::VectorXd points = eval_psi_inverse(c, targets);
    SampledFunction pulled(trig_interpolate(h.field, points));
    const double semi = hq_dot_seminorm(pulled, q);
    return std::pow(c.length, 1.0 - 2.0 * q.value) * semi * semi;
}

double embedding_bound(const DiscreteCurve& c, const TangentField& h, SobolevOrder q,
                       double ell) {
    if (!(q.value > 0.5))
        throw DomainError("embedding bound requires q > 1/2, got " +
                          std::to_string(q.value));
    if (!(ell > 0.0) || ell > c.length * (1.0 + 1e-12))
        throw DomainError("ell must lie in (0, l_c]");
    const MetricPlan plan(c.position);
    const double base = plan.g0(h.field.values, h.field.values);
    const double hom = plan.homogeneous(h.field.values, h.field.values, q);
    return std::sqrt((base + std::pow(ell, 2.0 * q.value) * hom) / ell);
}

double srv_lower_bound(const DiscreteCurve& c0, const DiscreteCurve& c1) {
    check_pair(c0, c1);
    const Eigen::MatrixXd diff = srv_transform(c0).values - srv_transform(c1).values;
    return std::sqrt(diff.squaredNorm() / static_cast<double>(c0.grid_size()));
}

double distance_lower_bound(const DiscreteCurve& c0, const DiscreteCurve& c1) {
    check_pair(c0, c1);
    const double sup = sup_distance(c0, c1, 4);
    const double diam_max = std::max(diameter(c0, 4), diameter(c1, 4));
    return std::min(sup, diam_max) * std::min(std::sqrt(diam_max), 1.0);
}

}  // namespace fracshape
