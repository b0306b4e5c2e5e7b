// SPDX-License-Identifier: Apache-2.0
//
// Shared generators and independent oracles for the test suites. Oracles here
// are deliberately written as naive direct summations so they exercise none of
// the library's transform code paths.
#pragma once

#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "fracshape/spectral.hpp"

namespace testutil {

constexpr double kTau = 2.0 * EIGEN_PI;

/// Random real trigonometric polynomial with modes |n| <= max_mode and
/// coefficient magnitudes ~ amplitude / n^decay.
inline fracshape::SampledFunction band_limited(unsigned seed, Eigen::Index n,
                                               Eigen::Index d, Eigen::Index max_mode,
                                               double amplitude = 1.0,
                                               double decay = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(n, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double mean = gauss(rng);
        for (Eigen::Index j = 0; j < n; ++j) values(j, k) = mean;
        for (Eigen::Index m = 1; m <= max_mode; ++m) {
            const double scale = amplitude / std::pow(static_cast<double>(m), decay);
            const double a = scale * gauss(rng);
            const double b = scale * gauss(rng);
            for (Eigen::Index j = 0; j < n; ++j) {
                const double t = kTau * static_cast<double>(m) * j / static_cast<double>(n);
                values(j, k) += a * std::cos(t) + b * std::sin(t);
            }
        }
    }
    return fracshape::SampledFunction(values);
}

/// Naive O(N^2) forward DFT with the library's normalization (1/N).
inline Eigen::MatrixXcd naive_forward(const Eigen::MatrixXd& samples) {
    const Eigen::Index n = samples.rows();
    Eigen::MatrixXcd out(n, samples.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        const Eigen::Index freq = r < n / 2 ? r : r - n;
        for (Eigen::Index k = 0; k < samples.cols(); ++k) {
            std::complex<double> acc(0.0, 0.0);
            for (Eigen::Index j = 0; j < n; ++j) {
                const double phase = -kTau * static_cast<double>(freq) * j /
                                     static_cast<double>(n);
                acc += samples(j, k) * std::polar(1.0, phase);
            }
            out(r, k) = acc / static_cast<double>(n);
        }
    }
    return out;
}

/// Direct series summation of the band-limited interpolant at one point,
/// Nyquist mode as cosine.
inline Eigen::VectorXd naive_series_eval(const Eigen::MatrixXcd& coeffs, double theta) {
    const Eigen::Index n = coeffs.rows();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(coeffs.cols());
    for (Eigen::Index k = 0; k < coeffs.cols(); ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (Eigen::Index r = 0; r < n; ++r) {
            const Eigen::Index freq = r < n / 2 ? r : r - n;
            if (freq == -n / 2) continue;
            acc += coeffs(r, k) * std::polar(1.0, kTau * static_cast<double>(freq) * theta);
        }
        acc += coeffs(n / 2, k).real() *
               std::cos(EIGEN_PI * static_cast<double>(n) * theta);
        out[k] = acc.real();
    }
    return out;
}

}  // namespace testutil
