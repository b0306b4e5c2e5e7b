// SPDX-License-Identifier: Apache-2.0
#include "fracshape/spectral.hpp"

#include <cmath>
#include <complex>

#include <unsupported/Eigen/FFT>

namespace fracshape {

namespace {
constexpr double kTwoPi = 2.0 * EIGEN_PI;
}

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

SampledFunction::SampledFunction(Eigen::MatrixXd samples) : values(std::move(samples)) {
    const Index n = values.rows();
    if (n < 8 || !is_power_of_two(n))
        throw ConfigError("grid size must be a power of two >= 8, got " +
                          std::to_string(n));
    if (values.cols() < 1) throw ConfigError("sample dimension must be >= 1");
    if (!values.allFinite()) throw ConfigError("samples must be finite");
}

namespace detail {

Eigen::VectorXcd dft_raw(const Eigen::VectorXcd& x) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd out(x.size());
    fft.fwd(out, x);
    return out;
}

Eigen::VectorXcd idft_raw(const Eigen::VectorXcd& x) {
    // Unscaled inverse via conjugation: idft(x) = conj(dft(conj(x))).
    Eigen::VectorXcd out = dft_raw(x.conjugate());
    return out.conjugate();
}

Eigen::VectorXd eval_series(const Eigen::VectorXcd& coeffs,
                            const Eigen::VectorXd& points) {
    const Index n = coeffs.size();
    const Index p = points.size();
    const Index half = n / 2;

    // Ascending frequency order: asc[k] holds frequency k - n/2.
    Eigen::VectorXcd asc(n);
    for (Index r = 0; r < n; ++r) {
        const Index freq = r < half ? r : r - n;
        asc[freq + half] = coeffs[r];
    }

    // Band-limited inputs leave most slots at zero; shrink the Horner range to
    // the numerically supported band.
    const double floor = 1e-16 * coeffs.cwiseAbs().maxCoeff();
    Index lo = 1, hi = n - 1;
    while (lo < hi && std::abs(asc[lo]) <= floor) ++lo;
    while (hi > lo && std::abs(asc[hi]) <= floor) --hi;

    Eigen::ArrayXcd z(p), acc(p);
    for (Index i = 0; i < p; ++i) z[i] = std::polar(1.0, kTwoPi * points[i]);
    acc.setConstant(asc[hi]);
    // Horner over frequencies hi - n/2 down to lo - n/2.
    for (Index k = hi - 1; k >= lo; --k) acc = acc * z + asc[k];

    Eigen::VectorXd out(p);
    const double nyq = asc[0].real();
    for (Index i = 0; i < p; ++i) {
        const std::complex<double> rot =
            std::polar(1.0, kTwoPi * static_cast<double>(lo - half) * points[i]);
        out[i] = (acc[i] * rot).real() +
                 nyq * std::cos(EIGEN_PI * static_cast<double>(n) * points[i]);
    }
    return out;
}

Eigen::VectorXcd pad_spectrum(const Eigen::VectorXcd& coeffs, Index m) {
    const Index n = coeffs.size();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(m);
    if (m >= n) {
        const Index half = n / 2;
        for (Index r = 0; r < half; ++r) out[r] = coeffs[r];
        for (Index r = half + 1; r < n; ++r) out[m - (n - r)] = coeffs[r];
        if (m == n) {
            out[half] = coeffs[half];
        } else {
            // Split the unpaired -n/2 mode across +-n/2.
            out[half] = 0.5 * coeffs[half];
            out[m - half] = 0.5 * std::conj(coeffs[half]);
        }
    } else {
        const Index half = m / 2;
        for (Index r = 0; r < half; ++r) out[r] = coeffs[r];
        for (Index r = half + 1; r < m; ++r) out[r] = coeffs[n - (m - r)];
        out[half] = coeffs[half] + coeffs[n - half];
    }
    return out;
}

Eigen::VectorXcd spectrum_adjoint_truncate(const Eigen::VectorXcd& coeffs, Index n) {
    const Index m = coeffs.size();
    Eigen::VectorXcd out(n);
    const Index half = n / 2;
    for (Index r = 0; r < half; ++r) out[r] = coeffs[r];
    for (Index r = half + 1; r < n; ++r) out[r] = coeffs[m - (n - r)];
    out[half] = 0.5 * (coeffs[m - half] + std::conj(coeffs[half]));
    return out;
}

Eigen::VectorXcd derivative_coeffs(const Eigen::VectorXcd& coeffs) {
    const Index n = coeffs.size();
    Eigen::VectorXcd out(n);
    for (Index r = 0; r < n; ++r) {
        const Index freq = r < n / 2 ? r : r - n;
        out[r] = freq == -n / 2 ? std::complex<double>(0.0, 0.0)
                                : coeffs[r] * std::complex<double>(
                                                  0.0, kTwoPi * static_cast<double>(freq));
    }
    return out;
}

Eigen::VectorXcd antiderivative_coeffs(const Eigen::VectorXcd& coeffs) {
    const Index n = coeffs.size();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
    for (Index r = 1; r < n; ++r) {
        const Index freq = r < n / 2 ? r : r - n;
        if (freq == -n / 2) continue;
        out[r] = coeffs[r] / std::complex<double>(0.0, kTwoPi * static_cast<double>(freq));
    }
    return out;
}

}  // namespace detail

SpectralCoeffs fourier_forward(const SampledFunction& f) {
    const Index n = f.grid_size();
    SpectralCoeffs out;
    out.coeffs.resize(n, f.dim());
    for (Index k = 0; k < f.dim(); ++k) {
        Eigen::VectorXcd col = f.values.col(k).cast<std::complex<double>>();
        out.coeffs.col(k) = detail::dft_raw(col) / static_cast<double>(n);
    }
    return out;
}

SampledFunction fourier_inverse(const SpectralCoeffs& coeffs) {
    const Index n = coeffs.grid_size();
    if (n < 8 || !is_power_of_two(n))
        throw ConfigError("coefficient grid size must be a power of two >= 8");
    Eigen::MatrixXd values(n, coeffs.dim());
    for (Index k = 0; k < coeffs.dim(); ++k) {
        Eigen::VectorXcd col = detail::idft_raw(coeffs.coeffs.col(k));
        values.col(k) = col.real();
    }
    return SampledFunction(std::move(values));
}

SpectralCoeffs fractional_multiplier(const SpectralCoeffs& coeffs, double p) {
    if (!(p >= 0.0) || !std::isfinite(p))
        throw DomainError("multiplier exponent must be finite and >= 0, got " +
                          std::to_string(p));
    const Index n = coeffs.grid_size();
    SpectralCoeffs out = coeffs;
    if (p == 0.0) return out;
    for (Index r = 0; r < n; ++r) {
        const double freq = static_cast<double>(out.frequency(r));
        const double w = freq == 0.0 ? 0.0 : std::pow(kTwoPi * std::abs(freq), p);
        out.coeffs.row(r) *= w;
    }
    return out;
}

double hq_dot_seminorm(const SampledFunction& f, SobolevOrder q) {
    const SpectralCoeffs coeffs = fourier_forward(f);
    const Index n = f.grid_size();
    double sum = 0.0;
    for (Index r = 0; r < n; ++r) {
        const double freq = static_cast<double>(coeffs.frequency(r));
        if (freq == 0.0) continue;
        sum += std::pow(std::pow(kTwoPi * std::abs(freq), 2), q.value) *
               coeffs.coeffs.row(r).squaredNorm();
    }
    return std::sqrt(sum);
}

double hq_norm(const SampledFunction& f, SobolevOrder q) {
    const SpectralCoeffs coeffs = fourier_forward(f);
    const Index n = f.grid_size();
    double sum = 0.0;
    for (Index r = 0; r < n; ++r) {
        const double freq = static_cast<double>(coeffs.frequency(r));
        sum += std::pow(1.0 + kTwoPi * freq * kTwoPi * freq, q.value) *
               coeffs.coeffs.row(r).squaredNorm();
    }
    return std::sqrt(sum);
}

Eigen::MatrixXd trig_interpolate(const SampledFunction& f,
                                 const Eigen::VectorXd& points) {
    if (!points.allFinite()) throw ConfigError("interpolation points must be finite");
    Eigen::VectorXd wrapped = points;
    for (Index i = 0; i < wrapped.size(); ++i)
        wrapped[i] -= std::floor(wrapped[i]);

    const SpectralCoeffs coeffs = fourier_forward(f);
    Eigen::MatrixXd out(points.size(), f.dim());
    for (Index k = 0; k < f.dim(); ++k)
        out.col(k) = detail::eval_series(coeffs.coeffs.col(k), wrapped);
    return out;
}

SampledFunction resample(const SampledFunction& f, Index m) {
    if (m < 8 || !is_power_of_two(m))
        throw ConfigError("resample target must be a power of two >= 8, got " +
                          std::to_string(m));
    if (m == f.grid_size()) return f;
    const SpectralCoeffs coeffs = fourier_forward(f);
    Eigen::MatrixXd values(m, f.dim());
    for (Index k = 0; k < f.dim(); ++k) {
        Eigen::VectorXcd padded = detail::pad_spectrum(coeffs.coeffs.col(k), m);
        values.col(k) = detail::idft_raw(padded).real();
    }
    return SampledFunction(std::move(values));
}

SampledFunction spectral_derivative(const SampledFunction& f) {
    const Index n = f.grid_size();
    SpectralCoeffs coeffs = fourier_forward(f);
    for (Index r = 0; r < n; ++r) {
        const Index freq = coeffs.frequency(r);
        if (freq == -n / 2) {
            coeffs.coeffs.row(r).setZero();
        } else {
            coeffs.coeffs.row(r) *=
                std::complex<double>(0.0, kTwoPi * static_cast<double>(freq));
        }
    }
    return fourier_inverse(coeffs);
}

double l2_norm(const SampledFunction& f) {
    return std::sqrt(f.values.squaredNorm() / static_cast<double>(f.grid_size()));
}

}  // namespace fracshape
