// SPDX-License-Identifier: Apache-2.0
//
// Reparametrization-invariant Sobolev metrics on discrete immersed curves.
//
// The full metric of order q is
//     G_c^q(h,k) = integral <h,k> ds
//                + l_c^{1-2q} sum_{n != 0} (2 pi |n|)^{2q} <ghat_h(n), conj ghat_k(n)>
// where ghat is the Fourier transform of the pullback h o psi_c^{-1} to the
// constant-speed parametrization. The pullback coefficients are evaluated by
// the change of variables
//     ghat(n) = (1/l_c) integral h(theta) |c_theta(theta)|
//               e^{-2 pi i n psi_c(theta)} dtheta,
// discretized with the periodic trapezoid rule on a 4x oversampled grid. This
// route needs no inversion of psi_c, is spectrally accurate, and is exactly
// differentiable with respect to the curve nodes; gq_dot_pullback implements
// the direct interpolate-at-psi-inverse route for cross-validation.
//
// For q = 0 the full metric reduces to the pure L^2(ds) form g0; the
// homogeneous term enters only for q > 0.
#pragma once

#include <Eigen/Dense>

#include "fracshape/curve.hpp"
#include "fracshape/spectral.hpp"

namespace fracshape {

enum class MetricVariant { full, homogeneous };

struct MetricParams {
    SobolevOrder q;
    MetricVariant variant = MetricVariant::full;
};

/// Shared evaluation context for one curve: fine-grid geometry and, on
/// non-constant-speed curves, the dense nonuniform Fourier basis. Build once
/// and reuse across tangent fields. Oversample must be a power of two >= 2.
class MetricPlan {
  public:
    explicit MetricPlan(const SampledFunction& position, int oversample = 4);

    double length() const { return length_; }
    Index grid_size() const { return n_; }
    Index dim() const { return d_; }
    Index fine_size() const { return nf_; }
    bool constant_speed() const { return uniform_; }
    double min_fine_speed() const { return fine_speed_.minCoeff(); }

    /// Largest pullback frequency kept in the weighted sums. Beyond nf/4 the
    /// trapezoid quadrature no longer resolves the oscillation of
    /// e^{-2 pi i n psi} on distorted curves, while the true coefficients of
    /// the analytic pullback are negligible there; with oversample >= 2 the
    /// cut still covers the whole band of the coarse grid.
    Index freq_cut() const { return nf_ / 4; }

    /// L^2(ds) inner product by fine-grid trapezoid quadrature.
    double g0(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k) const;

    /// Homogeneous form  l^{1-2q} sum_{n!=0} (2 pi |n|)^{2q} <ghat_h, ghat_k>.
    double homogeneous(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k,
                       SobolevOrder q) const;

    /// g0 + homogeneous for q > 0; exactly g0 at q = 0.
    double full(const Eigen::MatrixXd& h, const Eigen::MatrixXd& k,
                SobolevOrder q) const;

    /// Pullback coefficients ghat of a tangent field, nf x d in FFT row order.
    Eigen::MatrixXcd pullback_coeffs(const Eigen::MatrixXd& h) const;

  private:
    friend struct MetricQuadraticEval gq_quadratic_with_grad(
        const SampledFunction& position, const Eigen::MatrixXd& h, SobolevOrder q,
        int oversample);
    Eigen::MatrixXd upsample(const Eigen::MatrixXd& h) const;
    Eigen::MatrixXcd analysis(const Eigen::MatrixXcd& x) const;
    Eigen::MatrixXcd synthesis(const Eigen::MatrixXcd& x) const;

    Index n_ = 0, d_ = 0, nf_ = 0;
    double length_ = 0.0;
    bool uniform_ = false;
    Eigen::MatrixXd fine_tangent_;     // nf x d, c_theta at fine nodes
    Eigen::VectorXd fine_speed_;       // nf
    Eigen::VectorXd fine_psi_;         // nf
    Eigen::VectorXd fine_antideriv_;   // V_i with psi_i = theta_i + (V_i - V_0)/l
    Eigen::MatrixXcd basis_;           // nf x nf, empty on the constant-speed path
};

/// Value and node gradients of the quadratic form G_c^q(h,h), with the curve
/// dependence (through speed, length and psi_c) differentiated analytically.
struct MetricQuadraticEval {
    double value = 0.0;
    Eigen::MatrixXd grad_h;  // N x d
    Eigen::MatrixXd grad_c;  // N x d
};

MetricQuadraticEval gq_quadratic_with_grad(const SampledFunction& position,
                                           const Eigen::MatrixXd& h, SobolevOrder q,
                                           int oversample = 4);

double gq_quadratic_value(const SampledFunction& position, const Eigen::MatrixXd& h,
                          SobolevOrder q, int oversample = 4);

/// L^2(ds) inner product of two tangent fields.
double g0(const DiscreteCurve& c, const TangentField& h, const TangentField& k);

/// Homogeneous invariant form Gdot_c^q(h,k).
double gq_dot(const DiscreteCurve& c, const TangentField& h, const TangentField& k,
              SobolevOrder q);

/// Full invariant metric G_c^q(h,k).
double gq(const DiscreteCurve& c, const TangentField& h, const TangentField& k,
          SobolevOrder q);

double metric_value(const DiscreteCurve& c, const TangentField& h,
                    const TangentField& k, const MetricParams& params);

/// Reference route for Gdot_c^q(h,h): explicitly samples h o psi_c^{-1} on an
/// oversample*N grid via trigonometric interpolation at root-found points of
/// psi_c^{-1}, then applies the flat homogeneous seminorm.
double gq_dot_pullback(const DiscreteCurve& c, const TangentField& h, SobolevOrder q,
                       int oversample = 4);

/// sqrt( (1/ell) (|h|_{G^0}^2 + ell^{2q} |h|_{Gdot^q}^2) ) for ell in (0, l_c];
/// callers compare against the sup norm of h. Requires q > 1/2.
double embedding_bound(const DiscreteCurve& c, const TangentField& h, SobolevOrder q,
                       double ell);

/// L^2 distance of square-root-velocity transforms; a geodesic-distance lower
/// bound for metrics of order q >= 1.
double srv_lower_bound(const DiscreteCurve& c0, const DiscreteCurve& c1);

/// The constant-free bracket min{|c0-c1|_inf, diam_max} min{diam_max^{1/2}, 1};
/// a geodesic-distance lower bound up to a universal constant for q > 1/2.
double distance_lower_bound(const DiscreteCurve& c0, const DiscreteCurve& c1);

}  // namespace fracshape
