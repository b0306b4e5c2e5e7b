// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracshape/curve.hpp"
#include "helpers.hpp"

using namespace fracshape;
using testutil::kTau;

namespace {

/// Cardioid-type curve with a genuine cusp at theta = 0.
SampledFunction cusp_curve(Index n) {
    Eigen::MatrixXd pos(n, 2);
    for (Index j = 0; j < n; ++j) {
        const double t = kTau * j / static_cast<double>(n);
        pos(j, 0) = (1.0 - std::cos(t)) * std::cos(t);
        pos(j, 1) = (1.0 - std::cos(t)) * std::sin(t);
    }
    return SampledFunction(pos);
}

SampledFunction ellipse(Index n, double a, double b) {
    Eigen::MatrixXd pos(n, 2);
    for (Index j = 0; j < n; ++j) {
        const double t = kTau * j / static_cast<double>(n);
        pos(j, 0) = a * std::cos(t);
        pos(j, 1) = b * std::sin(t);
    }
    return SampledFunction(pos);
}

}  // namespace

TEST_CASE("circle curve caches") {
    const double r = 1.7;
    auto c = build_curve(circle_curve(64, r));
    CHECK((c.speed.array() - kTau * r).abs().maxCoeff() < 1e-10);
    CHECK(c.length == doctest::Approx(kTau * r).epsilon(1e-12));
    for (Index j = 0; j < 64; ++j)
        CHECK(c.psi[j] == doctest::Approx(j / 64.0).epsilon(1e-12));
}

TEST_CASE("ellipse reparametrization map") {
    auto c = build_curve(ellipse(256, 2.0, 1.0));
    for (Index j = 0; j + 1 < 256; ++j) CHECK(c.psi[j + 1] > c.psi[j]);
    CHECK(eval_psi(c, 1.0) == doctest::Approx(1.0).epsilon(1e-10));

    // Cumulative quadrature oracle for psi at 4x resolution.
    const Index fine = 1024;
    double acc = 0.0;
    Eigen::VectorXd cum(fine + 1);
    cum[0] = 0.0;
    auto speed_at = [&](double t) {
        return std::sqrt(std::pow(2.0 * kTau * std::sin(kTau * t), 2) +
                         std::pow(kTau * std::cos(kTau * t), 2));
    };
    for (Index i = 0; i < fine; ++i) {
        const double h = 1.0 / fine;
        acc += 0.5 * h * (speed_at(i * h) + speed_at((i + 1) * h));
        cum[i + 1] = acc;
    }
    for (Index j = 0; j < 256; j += 16) {
        const double oracle = cum[4 * j] / acc;
        CHECK(c.psi[j] == doctest::Approx(oracle).epsilon(2e-6));
    }
}

TEST_CASE("cusped curve violates the immersion condition") {
    CHECK_THROWS_AS(build_curve(cusp_curve(128)), ImmersionViolation);
}

TEST_CASE("psi composed with its inverse is the identity") {
    auto c = build_curve(ellipse(128, 2.0, 1.0));
    for (Index j = 0; j < 128; ++j) {
        const double u = j / 128.0;
        CHECK(eval_psi(c, eval_psi_inverse(c, u)) == doctest::Approx(u).epsilon(1e-8));
    }
}

TEST_CASE("arc-length derivative") {
    auto c = build_curve(circle_curve(64));
    SUBCASE("constants are annihilated") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Constant(64, 2, 1.5);
        auto dh = ds_derivative(c, TangentField(SampledFunction(v)));
        CHECK(dh.field.values.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("unit circle: D_s c is the unit tangent") {
        auto dc = ds_derivative(c, TangentField(c.position));
        CHECK((dc.field.values.rowwise().norm().array() - 1.0).abs().maxCoeff() < 1e-10);
    }
    SUBCASE("grid mismatch rejected") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Zero(32, 2);
        CHECK_THROWS_AS(ds_derivative(c, TangentField(SampledFunction(v))), ConfigError);
    }
}

TEST_CASE("constant speed resampling") {
    SUBCASE("circle is a fixed point") {
        auto c = build_curve(circle_curve(64, 2.0));
        auto cs = to_constant_speed(c);
        CHECK((cs.position.values - c.position.values).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("ellipse becomes constant speed") {
        auto c = build_curve(ellipse(256, 2.0, 1.0));
        auto cs = to_constant_speed(c);
        const double rel =
            (cs.speed.array() - cs.length).abs().maxCoeff() / cs.length;
        CHECK(rel < 1e-6);
        CHECK(cs.length == doctest::Approx(c.length).epsilon(1e-8));
    }
    SUBCASE("reparametrized circle recovers constant speed") {
        auto c = build_curve(circle_curve(128, 1.3));
        auto phi = random_diffeo(5, {.n = 128, .amplitude = 0.1});
        auto composed = compose_curve(c, phi);
        auto cs = to_constant_speed(composed);
        CHECK((cs.speed.array() - kTau * 1.3).abs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("diameter") {
    SUBCASE("circle") {
        auto c = build_curve(circle_curve(256, 1.5));
        CHECK(diameter(c) == doctest::Approx(3.0).epsilon(1e-6));
    }
    SUBCASE("flat ellipse approaches twice the semi-major axis") {
        auto c = build_curve(ellipse(256, 2.0, 0.02));
        const double d1 = diameter(c);
        const double d4 = diameter(c, 4);
        CHECK(d1 == doctest::Approx(4.0).epsilon(1e-4));
        CHECK(d4 == doctest::Approx(4.0).epsilon(1e-6));
        CHECK(d4 + 1e-12 >= d1);
    }
    SUBCASE("translation invariance") {
        auto c = build_curve(ellipse(128, 2.0, 1.0));
        Eigen::MatrixXd shifted = c.position.values;
        shifted.col(0).array() += 3.0;
        shifted.col(1).array() -= 7.0;
        auto ct = build_curve(SampledFunction(shifted));
        CHECK(diameter(ct) == doctest::Approx(diameter(c)).epsilon(1e-14));
    }
}

TEST_CASE("square-root-velocity transform") {
    SUBCASE("unit circle magnitude") {
        auto c = build_curve(circle_curve(64));
        auto q = srv_transform(c);
        CHECK((q.values.rowwise().norm().array() - std::sqrt(kTau)).abs().maxCoeff() <
              1e-10);
    }
    SUBCASE("homogeneity of degree 1/2") {
        auto c = build_curve(ellipse(64, 2.0, 1.0));
        const double lambda = 2.3;
        auto scaled = build_curve(SampledFunction(lambda * c.position.values));
        auto q = srv_transform(c);
        auto ql = srv_transform(scaled);
        CHECK((ql.values - std::sqrt(lambda) * q.values).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("L2 norm squared equals the length") {
        auto c = random_curve(17, {.n = 128});
        auto q = srv_transform(c);
        const double sq = q.values.squaredNorm() / 128.0;
        CHECK(sq == doctest::Approx(c.length).epsilon(1e-8));
    }
}

TEST_CASE("random curves") {
    SUBCASE("deterministic in the seed") {
        auto a = random_curve(42, {.n = 64});
        auto b = random_curve(42, {.n = 64});
        CHECK((a.position.values - b.position.values).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("decay 3 always immersed over many draws") {
        for (std::uint64_t s = 0; s < 200; ++s) {
            auto c = random_curve(s, {.n = 64, .decay = 3.0, .min_speed = 0.5});
            CHECK(c.min_speed >= 0.5);
        }
    }
    SUBCASE("impossible spec fails after the retry budget") {
        CHECK_THROWS_AS(
            random_curve(1, {.n = 64, .min_speed = 100.0, .amplitude = 3.0}),
            GenerationFailure);
    }
    SUBCASE("length scales exactly") {
        auto c = random_curve(7, {.n = 64});
        auto scaled = build_curve(SampledFunction(3.25 * c.position.values));
        CHECK(scaled.length == doctest::Approx(3.25 * c.length).epsilon(1e-12));
    }
}

TEST_CASE("random diffeomorphisms") {
    SUBCASE("zero amplitude is the identity") {
        auto phi = random_diffeo(3, {.n = 64, .amplitude = 0.0});
        for (Index j = 0; j < 64; ++j)
            CHECK(phi.values[j] == doctest::Approx(j / 64.0).epsilon(1e-14));
    }
    SUBCASE("derivative stays positive") {
        for (std::uint64_t s = 0; s < 50; ++s) {
            auto phi = random_diffeo(s, {.n = 64, .amplitude = 0.2});
            CHECK(phi.derivative.minCoeff() > 0.0);
        }
    }
    SUBCASE("composition with the inverse is the identity") {
        auto phi = random_diffeo(11, {.n = 128, .amplitude = 0.2});
        auto inv = invert_diffeo(phi);
        for (Index j = 0; j < 128; ++j) {
            const double t = j / 128.0;
            CHECK(eval_diffeo(phi, eval_diffeo(inv, t)) ==
                  doctest::Approx(t).epsilon(1e-8));
        }
    }
}

TEST_CASE("reparametrization invariance of length and diameter") {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        auto c = random_curve(100 + trial, {.n = 256, .decay = 3.0});
        auto phi = random_diffeo(200 + trial, {.n = 256, .amplitude = 0.15});
        auto composed = compose_curve(c, phi);
        CHECK(std::abs(composed.length - c.length) / c.length < 1e-6);
        const double d0 = diameter(c, 16);
        const double d1 = diameter(composed, 16);
        CHECK(std::abs(d1 - d0) / d0 < 1e-6);
    }
}

TEST_CASE("diameter is at most half the length") {
    for (std::uint64_t s = 0; s < 50; ++s) {
        auto c = random_curve(s, {.n = 128});
        CHECK(diameter(c) <= 0.5 * c.length + 1e-9);
    }
}

TEST_CASE("quarter diameter bound under the length hypothesis") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> uni(0.1, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto c0 = random_curve(300 + trial, {.n = 128});
        auto raw = random_curve(600 + trial, {.n = 128});
        const double target = uni(rng) * diameter(c0);
        auto c1 = build_curve(
            SampledFunction(raw.position.values * (target / raw.length)));
        const double sup = (c0.position.values - c1.position.values)
                               .rowwise()
                               .norm()
                               .maxCoeff();
        CHECK(0.25 * diameter(c0) <= sup + 1e-9);
    }
}
