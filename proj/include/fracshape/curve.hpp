// SPDX-License-Identifier: Apache-2.0
//
// Discrete immersed closed curves in R^d: cached speed, length, arc-length
// calculus, the constant-speed reparametrization psi_c and its inverse, the
// square-root-velocity transform, and seeded random generators for curves and
// circle diffeomorphisms.
#pragma once

#include <Eigen/Dense>

#include "fracshape/spectral.hpp"

namespace fracshape {

/// Immersed closed curve sampled on the uniform grid. Immutable after
/// construction through build_curve; all derived quantities are cached.
struct DiscreteCurve {
    SampledFunction position;    // N x d node positions, d >= 2
    SampledFunction derivative;  // c_theta at the nodes (spectral)
    Eigen::VectorXd speed;       // |c_theta| at the nodes
    Eigen::VectorXcd speed_coeffs;  // Fourier coefficients of the speed samples
    double length = 0.0;            // integral of speed (periodic trapezoid)
    Eigen::VectorXd psi;            // constant-speed map psi_c at the nodes
    Eigen::VectorXd psi_inverse;    // psi_c^{-1} at the nodes
    double min_speed = 0.0;
    double max_speed = 0.0;

    Index grid_size() const { return position.grid_size(); }
    Index dim() const { return position.dim(); }
};

/// Tangent vector h along a curve; grid compatibility with the curve it lives
/// over is validated at every operation entry.
struct TangentField {
    TangentField() = default;
    explicit TangentField(SampledFunction f) : field(std::move(f)) {}
    SampledFunction field;
};

/// Sampled orientation-preserving diffeomorphism of S^1, lifted to R so that
/// phi(theta + 1) = phi(theta) + 1.
struct DiffeoSample {
    Eigen::VectorXd values;           // lifted phi(theta_j), strictly increasing
    Eigen::VectorXd derivative;       // phi_theta at the nodes, > 0
    Eigen::VectorXcd periodic_coeffs; // coefficients of phi(theta) - theta

    Index grid_size() const { return values.size(); }
};

/// Builds the cached curve from node positions. The immersion threshold is
/// relative: min |c_theta| >= eps_rel * max |c_theta|.
DiscreteCurve build_curve(const SampledFunction& position, double eps_rel = 1e-8);

/// Arc-length derivative D_s h = h_theta / |c_theta|.
TangentField ds_derivative(const DiscreteCurve& c, const TangentField& h);

/// Resamples the curve at psi_c^{-1}; the result has speed l_c up to aliasing.
DiscreteCurve to_constant_speed(const DiscreteCurve& c);

/// Node-level diameter max_{i,j} |c(theta_i) - c(theta_j)|. With oversample > 1
/// the positions are first resampled on an oversample*N grid.
double diameter(const DiscreteCurve& c, int oversample = 1);

/// Square-root-velocity transform c_theta / |c_theta|^{1/2} at the nodes.
SampledFunction srv_transform(const DiscreteCurve& c);

struct RandomCurveSpec {
    Index n = 256;
    Index d = 2;
    double decay = 3.0;       // coefficient magnitude ~ amplitude / mode^decay
    double min_speed = 1.0;   // absolute rejection threshold on node speeds
    double amplitude = 0.5;
    Index max_mode = 0;       // 0 means n/8
    double base_radius = 1.0;
};

/// Base circle plus decaying random modes; rejection-resamples until the node
/// speeds clear min_speed. Deterministic in the seed.
DiscreteCurve random_curve(std::uint64_t seed, const RandomCurveSpec& spec);

struct RandomDiffeoSpec {
    Index n = 256;
    double amplitude = 0.15;
    Index max_mode = 3;
    double min_slope = 0.05;  // rejection threshold on phi_theta
};

/// phi(theta) = theta + low-frequency random perturbation, rejected until
/// phi_theta stays above min_slope. amplitude = 0 gives the identity.
DiffeoSample random_diffeo(std::uint64_t seed, const RandomDiffeoSpec& spec);

DiffeoSample identity_diffeo(Index n);

/// Validates and completes a diffeo given its lifted node values.
DiffeoSample make_diffeo(const Eigen::VectorXd& lifted_values);

/// phi^{-1}, sampled on the same grid by monotone root-finding.
DiffeoSample invert_diffeo(const DiffeoSample& phi);

/// Lifted evaluation of the interpolated diffeo at arbitrary points.
double eval_diffeo(const DiffeoSample& phi, double theta);
Eigen::VectorXd eval_diffeo(const DiffeoSample& phi, const Eigen::VectorXd& thetas);

/// f \circ phi sampled on a grid of size target_n (default: grid of f).
SampledFunction compose_function(const SampledFunction& f, const DiffeoSample& phi,
                                 Index target_n = 0);

/// c \circ phi as a new curve on a grid of size target_n (default: grid of c).
DiscreteCurve compose_curve(const DiscreteCurve& c, const DiffeoSample& phi,
                            Index target_n = 0);

/// Lifted evaluation of the interpolated constant-speed map psi_c.
double eval_psi(const DiscreteCurve& c, double theta);

/// psi_c^{-1} at arbitrary points in [0,1), by bisection-safeguarded Newton on
/// the cumulative-arclength interpolant to 1e-12 in theta.
double eval_psi_inverse(const DiscreteCurve& c, double u);
Eigen::VectorXd eval_psi_inverse(const DiscreteCurve& c, const Eigen::VectorXd& us);

/// Circle of given radius in the (x,y)-plane of R^d, with phase offset.
SampledFunction circle_curve(Index n, double radius = 1.0, Index d = 2,
                             double phase = 0.0,
                             const Eigen::VectorXd& center = Eigen::VectorXd());

}  // namespace fracshape
