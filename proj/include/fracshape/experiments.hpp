// SPDX-License-Identifier: Apache-2.0
//
// Scripted numerical experiments: the shrinking-circle incompleteness witness
// with its quadrature oracle, the degenerate-distance refinement probe, the
// randomized inequality benches, and the metric-ball norm-equivalence probe.
// Reports are deterministic functions of (name, parameters, seed).
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "fracshape/geodesic.hpp"

namespace fracshape {

struct PlotSeries {
    std::string name;
    Eigen::VectorXd x;
    Eigen::VectorXd y;
};

struct Assertion {
    std::string name;       // machine id of the check
    std::string statement;  // the mathematical statement being exercised
    bool pass = false;
    double observed = 0.0;
    double threshold = 0.0;
};

struct ExperimentReport {
    std::string name;
    std::vector<std::pair<std::string, double>> params;
    std::vector<std::pair<std::string, double>> results;
    std::vector<Assertion> assertions;
    std::vector<PlotSeries> series;
    double runtime_seconds = 0.0;  // informational; excluded from serialization

    bool passed() const {
        for (const auto& a : assertions)
            if (!a.pass) return false;
        return true;
    }
};

struct ShrinkOptions {
    int min_level = 2;   // epsilon = 2^-level
    int max_level = 12;
    int oversample = 4;
};

/// Shrinks the unit circle c(t) = (1-t)(cos, sin) towards zero and compares
/// discrete path lengths on [0, 1-eps] against the one-dimensional quadrature
/// oracle sqrt(2 pi) sqrt((1-t) + (1-t)^{1-2q}) (homogeneous term absent at
/// q = 0). Partial lengths telescope over dyadic time segments, each with its
/// own uniform grid of time_slices slices, so the near-singular tail is
/// resolved; the single-grid value is reported alongside.
ExperimentReport shrinking_circle(SobolevOrder q, Index time_slices, Index grid_size,
                                  const ShrinkOptions& opts = {});

struct VanishingOptions {
    Index base_grid = 16;       // N_0; level k uses N_0 2^k spatial nodes
    Index base_slices = 6;      // M_0; level k uses M_0 2^k time slices
    double diffeo_amplitude = 1.2;
    int max_iter = 400;
    double tol = 1e-7;
    int oversample = 4;
};

/// Fixes c0 = unit circle and c1 = c0 o phi1 for a seeded random diffeo and
/// minimizes path energy at a sequence of refinement levels, both restricted
/// to the reparametrization family and unrestricted. Records the minimized
/// upper bounds U_k; for q <= 1/2 they should keep collapsing (trend evidence,
/// not proof), for q > 1/2 they stabilize at a strictly positive floor.
ExperimentReport vanishing_distance_probe(SobolevOrder q, std::uint64_t seed,
                                          int levels,
                                          const VanishingOptions& opts = {});

struct BenchOptions {
    Index grid_size = 0;  // 0: per-bench default
    int jobs = 1;
};

/// which: nesting | product_full | product_hom | product_linfty | composition |
/// invariant_nesting | hom_vs_full | embedding | diameter.
/// Exact-constant inequalities assert zero violations beyond a 1e-6 slack;
/// constant-unknown estimates record the empirical max ratio and assert
/// stability (< 2x change) under grid doubling.
ExperimentReport inequality_bench(const std::string& which, Index trials,
                                  std::uint64_t seed, const BenchOptions& opts = {});

struct BallOptions {
    Index grid_size = 64;
    Index curves = 16;
    Index fields_per_curve = 32;
    double perturbation = 0.12;
    Index time_slices = 6;
    int max_iter = 60;
};

/// Samples curves inside a recorded G^q-metric ball of the unit circle (radius
/// certified by solver path lengths) and records the ratio of the invariant
/// metric norm to the flat Sobolev norm of random fields; the ratio interval
/// must be bounded and stable when the sample count doubles. Requires q > 3/2.
ExperimentReport ball_equivalence_probe(SobolevOrder q, std::uint64_t seed,
                                        const BallOptions& opts = {});

/// Names accepted by inequality_bench.
const std::vector<std::string>& bench_names();

}  // namespace fracshape
