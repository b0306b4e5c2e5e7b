// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <random>

#include "fracshape/geodesic.hpp"
#include "helpers.hpp"

using namespace fracshape;
using testutil::kTau;

namespace {

/// 1-D Riemannian length of the concentric-circle family between radii a, b:
/// integral of sqrt(2 pi (r + r^{1-2q})) dr, by a fine midpoint rule.
double circle_family_length(double a, double b, double q, int cells = 200000) {
    const double dr = (b - a) / cells;
    double acc = 0.0;
    for (int i = 0; i < cells; ++i) {
        const double r = a + (i + 0.5) * dr;
        acc += std::sqrt(kTau * (r + std::pow(r, 1.0 - 2.0 * q))) * dr;
    }
    return acc;
}

PathGrid concentric_linear_path(Index n, double r0, double r1, Index m) {
    auto c0 = build_curve(circle_curve(n, r0));
    auto c1 = build_curve(circle_curve(n, r1));
    return linear_path(c0, c1, m);
}

PathGrid random_smooth_path(unsigned seed, Index n, Index m) {
    auto base = random_curve(seed, {.n = n, .decay = 3.0, .max_mode = n / 8});
    auto dir = testutil::band_limited(seed + 1, n, 2, n / 8, 0.3, 2.0);
    std::vector<SampledFunction> slices;
    for (Index i = 0; i <= m; ++i) {
        const double t = static_cast<double>(i) / m;
        slices.emplace_back(
            Eigen::MatrixXd(base.position.values + t * dir.values +
                            0.2 * std::sin(EIGEN_PI * t) * dir.values.reverse().matrix()));
    }
    return make_path(slices);
}

}  // namespace

TEST_CASE("constant path has zero energy and length") {
    auto c = random_curve(1, {.n = 32});
    std::vector<SampledFunction> slices(9, c.position);
    auto path = make_path(slices);
    CHECK(path_energy(path, SobolevOrder(1.0)) < 1e-20);
    CHECK(path_length(path, SobolevOrder(1.0)) < 1e-10);
}

TEST_CASE("linear concentric path matches the closed-form energy") {
    // r(t) = 1 + t: E = 2 pi integral (1+t) + (1+t)^{-1} dt = 2 pi (3/2 + ln 2).
    auto path = concentric_linear_path(32, 1.0, 2.0, 64);
    const double expect = kTau * (1.5 + std::log(2.0));
    CHECK(path_energy(path, SobolevOrder(1.0)) ==
          doctest::Approx(expect).epsilon(1e-2));
    auto path2 = concentric_linear_path(32, 1.0, 2.0, 128);
    const double e1 = path_energy(path, SobolevOrder(1.0));
    const double e2 = path_energy(path2, SobolevOrder(1.0));
    CHECK(std::abs(e1 - e2) / e2 < 1e-2);
}

TEST_CASE("length squared never exceeds energy") {
    auto path = random_smooth_path(7, 32, 8);
    for (double q : {0.0, 0.5, 1.0, 1.8}) {
        const double len = path_length(path, SobolevOrder(q));
        const double en = path_energy(path, SobolevOrder(q));
        CHECK(len * len <= en * (1.0 + 1e-12));
    }
}

TEST_CASE("piecewise-linear time reparametrization preserves length") {
    auto path = concentric_linear_path(32, 1.0, 2.0, 64);
    const Index m = path.segments();
    std::vector<SampledFunction> warped;
    for (Index i = 0; i <= m; ++i) {
        const double t = static_cast<double>(i) / m;
        double tau = t + 0.15 * std::sin(EIGEN_PI * t);
        tau = std::clamp(tau, 0.0, 1.0);
        const double pos = tau * m;
        const Index k = std::min<Index>(static_cast<Index>(pos), m - 1);
        const double frac = pos - k;
        warped.emplace_back(Eigen::MatrixXd(
            (1.0 - frac) * path.curves[k].position.values +
            frac * path.curves[k + 1].position.values));
    }
    auto warped_path = make_path(warped);
    const double l0 = path_length(path, SobolevOrder(1.0));
    const double l1 = path_length(warped_path, SobolevOrder(1.0));
    CHECK(std::abs(l1 - l0) / l0 < 1e-3);
}

TEST_CASE("energy gradient") {
    SUBCASE("vanishes on a constant path") {
        auto c = random_curve(2, {.n = 32});
        std::vector<SampledFunction> slices(5, c.position);
        auto grads = energy_gradient(make_path(slices), SobolevOrder(1.0));
        for (const auto& g : grads) CHECK(g.field.values.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("matches central differences along random directions") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> qdist(0.3, 2.0);
        for (int trial = 0; trial < 4; ++trial) {
            auto path = random_smooth_path(10 + trial, 32, 4);
            const SobolevOrder q(qdist(rng));
            auto pos0 = std::vector<Eigen::MatrixXd>();
            for (const auto& c : path.curves) pos0.push_back(c.position.values);

            std::vector<Eigen::MatrixXd> grads;
            path_energy_positions(pos0, q, 4, &grads);

            std::vector<Eigen::MatrixXd> dirs;
            double analytic = 0.0;
            for (Index i = 0; i < static_cast<Index>(pos0.size()); ++i) {
                Eigen::MatrixXd dir =
                    testutil::band_limited(100 * trial + i, 32, 2, 8, 1.0, 1.0).values;
                if (i == 0 || i + 1 == static_cast<Index>(pos0.size())) dir.setZero();
                dirs.push_back(dir);
                analytic += (grads[i].array() * dir.array()).sum();
            }
            const double eps = 1e-5;
            auto shifted = [&](double sgn) {
                auto p = pos0;
                for (size_t i = 0; i < p.size(); ++i) p[i] += sgn * eps * dirs[i];
                return path_energy_positions(p, q, 4, nullptr);
            };
            const double fd = (shifted(1.0) - shifted(-1.0)) / (2.0 * eps);
            CHECK(std::abs(analytic - fd) / std::max(1.0, std::abs(fd)) < 1e-4);
        }
    }
}

TEST_CASE("boundary value solver") {
    SUBCASE("identical endpoints give a zero path") {
        auto c = random_curve(4, {.n = 32});
        auto [path, report] = solve_bvp(c, c, SobolevOrder(1.0), {.time_slices = 4});
        CHECK(report.converged);
        CHECK(report.distance_upper_bound < 1e-10);
    }
    SUBCASE("concentric circles match the radial oracle within 2 percent") {
        auto c0 = build_curve(circle_curve(32, 1.0));
        auto c1 = build_curve(circle_curve(32, 2.0));
        auto [path, report] =
            solve_bvp(c0, c1, SobolevOrder(1.0),
                      {.time_slices = 16, .max_iter = 400, .tol = 1e-6});
        CHECK(report.converged);
        const double oracle = circle_family_length(1.0, 2.0, 1.0);
        CHECK(std::abs(report.distance_upper_bound - oracle) / oracle < 0.02);
        CHECK(report.distance_upper_bound * report.distance_upper_bound <=
              report.energy * (1.0 + 1e-12));
        // Constant-speed-in-t at the minimizer: length^2 == energy.
        CHECK(report.distance_upper_bound * report.distance_upper_bound ==
              doctest::Approx(report.energy).epsilon(1e-6));
        // First-order optimality of the reported path.
        auto grads = energy_gradient(path, SobolevOrder(1.0));
        double gnorm2 = 0.0;
        for (const auto& g : grads) gnorm2 += g.field.values.squaredNorm();
        CHECK(std::sqrt(gnorm2) <= 1e-6 * (1.0 + report.energy));
    }
    SUBCASE("upper bound dominates the SRV lower bound") {
        for (int trial = 0; trial < 3; ++trial) {
            auto c0 = random_curve(50 + trial, {.n = 32, .max_mode = 4});
            auto c1 = random_curve(60 + trial, {.n = 32, .max_mode = 4});
            auto [path, report] =
                solve_bvp(c0, c1, SobolevOrder(1.0),
                          {.time_slices = 8, .max_iter = 120, .tol = 1e-5});
            CHECK(report.distance_upper_bound >= srv_lower_bound(c0, c1) - 1e-9);
        }
    }
    SUBCASE("energy never increases from the initial path") {
        auto c0 = random_curve(70, {.n = 32, .max_mode = 4});
        auto c1 = random_curve(71, {.n = 32, .max_mode = 4});
        auto init = linear_path(c0, c1, 8);
        const double e0 = path_energy(init, SobolevOrder(1.0));
        auto [path, report] = solve_bvp(c0, c1, SobolevOrder(1.0),
                                        {.time_slices = 8, .max_iter = 60});
        CHECK(report.energy <= e0 * (1.0 + 1e-12));
    }
}

TEST_CASE("solver distance is reparametrization equivariant within 1 percent") {
    auto c0 = build_curve(circle_curve(32, 1.0));
    auto c1 = build_curve(circle_curve(32, 1.6));
    auto phi = random_diffeo(9, {.n = 32, .amplitude = 0.3, .max_mode = 2});
    auto [p1, r1] = solve_bvp(c0, c1, SobolevOrder(1.0),
                              {.time_slices = 8, .max_iter = 200, .tol = 1e-6});
    auto [p2, r2] = solve_bvp(compose_curve(c0, phi), compose_curve(c1, phi),
                              SobolevOrder(1.0),
                              {.time_slices = 8, .max_iter = 200, .tol = 1e-6});
    CHECK(std::abs(r1.distance_upper_bound - r2.distance_upper_bound) /
              r1.distance_upper_bound <
          0.01);
}

TEST_CASE("triangle inequality sanity for solver upper bounds") {
    auto a = build_curve(circle_curve(32, 1.0));
    auto b = build_curve(circle_curve(32, 1.5));
    auto c = build_curve(circle_curve(32, 2.0));
    SolveOptions opts{.time_slices = 8, .max_iter = 150, .tol = 1e-6};
    const double dab = solve_bvp(a, b, SobolevOrder(1.0), opts).second.distance_upper_bound;
    const double dbc = solve_bvp(b, c, SobolevOrder(1.0), opts).second.distance_upper_bound;
    const double dac = solve_bvp(a, c, SobolevOrder(1.0), opts).second.distance_upper_bound;
    // Upper bounds satisfy the triangle inequality up to solver slack.
    CHECK(dac <= dab + dbc + 0.02 * (dab + dbc));
}

TEST_CASE("path refinement") {
    auto path = concentric_linear_path(32, 1.0, 2.0, 8);
    SUBCASE("shared nodes unchanged, refined energy close") {
        auto fine = refine_path(path, 2);
        CHECK(fine.segments() == 16);
        for (Index i = 0; i <= path.segments(); ++i)
            CHECK((fine.curves[2 * i].position.values -
                   path.curves[i].position.values)
                      .cwiseAbs()
                      .maxCoeff() == 0.0);
        const double e_coarse = path_energy(path, SobolevOrder(1.0));
        const double e_fine = path_energy(fine, SobolevOrder(1.0));
        CHECK(std::abs(e_coarse - e_fine) / e_coarse < 1e-2);
        auto four = refine_path(path, 4);
        CHECK(four.segments() == 32);
    }
    SUBCASE("re-minimization after refinement does not increase energy") {
        auto c0 = build_curve(circle_curve(32, 1.0));
        auto c1 = build_curve(circle_curve(32, 2.0));
        auto [coarse, rc] = solve_bvp(c0, c1, SobolevOrder(1.0),
                                      {.time_slices = 4, .max_iter = 150});
        auto fine = refine_path(coarse, 2);
        const double embedded = path_energy(fine, SobolevOrder(1.0));
        auto [opt, rf] = solve_bvp(c0, c1, SobolevOrder(1.0),
                                   {.time_slices = 8, .max_iter = 200});
        CHECK(rf.energy <= embedded + 1e-9);
    }
}

TEST_CASE("discrete exponential map") {
    SUBCASE("zero velocity is a fixed point") {
        auto c = build_curve(circle_curve(32, 1.0));
        TangentField h0{SampledFunction(Eigen::MatrixXd::Zero(32, 2))};
        auto traj = discrete_exp(c, h0, SobolevOrder(1.0), 4);
        for (const auto& slice : traj.curves)
            CHECK((slice.position.values - c.position.values).cwiseAbs().maxCoeff() <
                  1e-12);
    }
    SUBCASE("radial shooting stays in the concentric circle family") {
        auto c = build_curve(circle_curve(32, 1.0));
        TangentField h0{SampledFunction(Eigen::MatrixXd(0.45 * c.position.values))};
        auto traj = discrete_exp(c, h0, SobolevOrder(1.0), 16);
        double max_off = 0.0;
        for (const auto& slice : traj.curves) {
            // Project onto the circle direction; the residual is the
            // off-family component.
            const Eigen::MatrixXd& p = slice.position.values;
            const double r = (p.array() * c.position.values.array()).sum() /
                             c.position.values.squaredNorm();
            max_off = std::max(
                max_off, (p - r * c.position.values).cwiseAbs().maxCoeff());
        }
        CHECK(max_off < 1e-6);
        // Discrete energy drift along the trajectory.
        std::vector<double> energies;
        const double dt = 1.0 / traj.segments();
        for (Index i = 0; i < traj.segments(); ++i) {
            const Eigen::MatrixXd diff = traj.curves[i + 1].position.values -
                                         traj.curves[i].position.values;
            SampledFunction mid(0.5 * (traj.curves[i + 1].position.values +
                                       traj.curves[i].position.values));
            energies.push_back(gq_quadratic_value(mid, diff, SobolevOrder(1.0)) /
                               (dt * dt));
        }
        const double emax = *std::max_element(energies.begin(), energies.end());
        const double emin = *std::min_element(energies.begin(), energies.end());
        CHECK((emax - emin) / emax < 1e-4);
    }
    SUBCASE("shooting then solving the endpoints reproduces the length") {
        auto c = build_curve(circle_curve(32, 1.0));
        auto dir = testutil::band_limited(33, 32, 2, 4, 0.15, 2.0);
        TangentField h0{dir};
        auto traj = discrete_exp(c, h0, SobolevOrder(1.0), 8);
        const double traj_len = path_length(traj, SobolevOrder(1.0));
        auto [path, report] =
            solve_bvp(traj.curves.front(), traj.curves.back(), SobolevOrder(1.0),
                      {.time_slices = 8, .max_iter = 250, .tol = 1e-7});
        CHECK(report.distance_upper_bound <= traj_len * (1.0 + 1e-6));
        CHECK(std::abs(report.distance_upper_bound - traj_len) / traj_len < 0.02);
    }
    SUBCASE("precondition checks") {
        auto c = build_curve(circle_curve(32, 1.0));
        TangentField h0{SampledFunction(Eigen::MatrixXd::Zero(32, 2))};
        CHECK_THROWS_AS(discrete_exp(c, h0, SobolevOrder(0.5), 4), DomainError);
        CHECK_THROWS_AS(discrete_exp(c, h0, SobolevOrder(1.0), 1), ConfigError);
    }
}
