// SPDX-License-Identifier: Apache-2.0
//
// Periodic spectral calculus on the circle S^1 = R/Z: discrete Fourier
// transforms of uniformly sampled R^d-valued functions, fractional Fourier
// multipliers, Sobolev norms H^q and homogeneous seminorms, and band-limited
// trigonometric interpolation.
//
// Conventions used throughout the library:
//   * Grid nodes are theta_j = j/N with N >= 8 a power of two.
//   * Forward transform  fhat(n) = (1/N) sum_j f(theta_j) e^{-2 pi i n theta_j},
//     so fhat(0) is the mean of the samples.
//   * Frequencies n run over {-N/2, ..., N/2 - 1} and are stored in FFT order:
//     row r holds frequency r for r < N/2 and r - N otherwise.
//   * Fractional multipliers use the symbol (2 pi |n|)^p, so that the operator
//     with symbol 2 pi |n| equals d/dtheta composed with the Hilbert transform
//     exactly on the discrete grid.
#pragma once

#include <Eigen/Dense>

#include "fracshape/errors.hpp"

namespace fracshape {

using Index = Eigen::Index;

/// Nonnegative, finite Sobolev order q.
struct SobolevOrder {
    explicit SobolevOrder(double q) : value(q) {
        if (!(q >= 0.0) || !std::isfinite(q))
            throw DomainError("Sobolev order must be finite and >= 0, got " +
                              std::to_string(q));
    }
    double value;
};

/// Uniformly sampled R^d-valued function on S^1. Row j is the value at j/N.
struct SampledFunction {
    SampledFunction() = default;
    explicit SampledFunction(Eigen::MatrixXd samples);

    Index grid_size() const { return values.rows(); }
    Index dim() const { return values.cols(); }

    Eigen::MatrixXd values;  // N x d
};

/// Complex Fourier coefficients of a SampledFunction, in FFT row order.
struct SpectralCoeffs {
    Index grid_size() const { return coeffs.rows(); }
    Index dim() const { return coeffs.cols(); }

    /// Frequency held by row r: r for r < N/2, else r - N.
    Index frequency(Index r) const {
        return r < coeffs.rows() / 2 ? r : r - coeffs.rows();
    }

    Eigen::MatrixXcd coeffs;  // N x d
};

bool is_power_of_two(Index n);

/// fhat(n) = (1/N) sum_j f_j e^{-2 pi i n j / N}.
SpectralCoeffs fourier_forward(const SampledFunction& f);

/// Inverse of fourier_forward; returns the real part of the synthesis sum.
SampledFunction fourier_inverse(const SpectralCoeffs& coeffs);

/// Scales the coefficient at frequency n by (2 pi |n|)^p. The n = 0
/// coefficient is zeroed for p > 0 and left unchanged for p = 0.
SpectralCoeffs fractional_multiplier(const SpectralCoeffs& coeffs, double p);

/// Homogeneous seminorm sqrt(sum_{n != 0} (2 pi |n|)^{2q} |fhat(n)|^2).
/// Constants are annihilated for every q >= 0.
double hq_dot_seminorm(const SampledFunction& f, SobolevOrder q);

/// Full Sobolev norm sqrt(sum_n (1 + (2 pi n)^2)^q |fhat(n)|^2).
double hq_norm(const SampledFunction& f, SobolevOrder q);

/// Evaluates the band-limited interpolant sum_n fhat(n) e^{2 pi i n theta} at
/// the given points (wrapped to [0,1)). The unpaired Nyquist mode -N/2 is
/// evaluated as a cosine so real samples give real values. Result is P x d.
Eigen::MatrixXd trig_interpolate(const SampledFunction& f,
                                 const Eigen::VectorXd& points);

/// Samples the interpolant of f on the uniform grid of size m (power of two).
/// Upsampling is exact on the band-limited class; downsampling truncates the
/// spectrum (low-pass), merging the Nyquist pair.
SampledFunction resample(const SampledFunction& f, Index m);

/// Spectral derivative d/dtheta; the unpaired Nyquist mode is zeroed.
SampledFunction spectral_derivative(const SampledFunction& f);

/// L^2(S^1) norm via the periodic trapezoid rule, sqrt(mean_j |f_j|^2).
double l2_norm(const SampledFunction& f);

namespace detail {

/// Unnormalized DFT: X_k = sum_j x_j e^{-2 pi i j k / N}.
Eigen::VectorXcd dft_raw(const Eigen::VectorXcd& x);

/// Unnormalized inverse: x_j = sum_k X_k e^{+2 pi i j k / N}.
Eigen::VectorXcd idft_raw(const Eigen::VectorXcd& x);

/// Evaluates sum_n c_n e^{2 pi i n theta} (coeffs in FFT order, Nyquist as
/// cosine) at arbitrary points; returns the real part.
Eigen::VectorXd eval_series(const Eigen::VectorXcd& coeffs,
                            const Eigen::VectorXd& points);

/// Zero-pads an FFT-order spectrum of size n to size m >= n, splitting the
/// Nyquist coefficient across +-n/2 so real signals stay real. For m < n,
/// truncates and merges the pair (adjoint of the splitting convention).
Eigen::VectorXcd pad_spectrum(const Eigen::VectorXcd& coeffs, Index m);

/// Exact adjoint (real pairing) of pad_spectrum for m >= n inputs: truncates a
/// size-m spectrum to size n, with 0.5 (R(-n/2) + conj(R(+n/2))) in the
/// Nyquist slot.
Eigen::VectorXcd spectrum_adjoint_truncate(const Eigen::VectorXcd& coeffs, Index n);

/// Multiplies slot r by 2 pi i freq(r); the unpaired Nyquist mode is zeroed.
Eigen::VectorXcd derivative_coeffs(const Eigen::VectorXcd& coeffs);

/// Divides slot r by 2 pi i freq(r) for freq != 0; zeroes the mean and the
/// unpaired Nyquist mode. Coefficients of the periodic antiderivative part.
Eigen::VectorXcd antiderivative_coeffs(const Eigen::VectorXcd& coeffs);

}  // namespace detail

}  // namespace fracshape
