// SPDX-License-Identifier: Apache-2.0
//
// Time-discretized path energies on the space of immersed curves, a geodesic
// boundary-value solver producing distance upper bounds, path refinement, and
// a variational time-stepper for the initial-value problem.
//
// A path is M+1 curves at uniform times on [0,1]. Its energy is the midpoint
// quadrature sum_m (1/dt) G^q_{(c_m + c_{m+1})/2}(c_{m+1} - c_m, c_{m+1} - c_m)
// and its length the corresponding sum of square roots; length^2 <= energy.
#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracshape/curve.hpp"
#include "fracshape/metric.hpp"

namespace fracshape {

/// Time-discretized path of immersed curves on a common spatial grid.
struct PathGrid {
    Eigen::VectorXd times;              // M+1 uniform nodes on [0,1]
    std::vector<DiscreteCurve> curves;  // M+1 slices
    bool endpoints_fixed = true;

    Index segments() const { return static_cast<Index>(curves.size()) - 1; }
    Index grid_size() const { return curves.front().grid_size(); }
    Index dim() const { return curves.front().dim(); }
};

/// Validates slices (common grid, immersion via build_curveep) and assembles a
/// path with uniform times.
PathGrid make_path(const std::vector<SampledFunction>& positions,
                   bool endpoints_fixed = true);

/// Straight-line interpolation in node space; if an intermediate slice fails
/// the immersion check the path is lifted by an added circular mode of the
/// smallest sufficient amplitude.
PathGrid linear_path(const DiscreteCurve& c0, const DiscreteCurve& c1,
                     Index time_slices);

double path_energy(const PathGrid& path, SobolevOrder q, int oversample = 4);
double path_length(const PathGrid& path, SobolevOrder q, int oversample = 4);

/// Energy and, optionally, its gradient with respect to every slice's node
/// positions (endpoints included; callers discard what they hold fixed).
double path_energy_positions(const std::vector<Eigen::MatrixXd>& positions,
                             SobolevOrder q, int oversample,
                             std::vector<Eigen::MatrixXd>* gradients);

/// Gradient of path_energy with respect to the interior slices.
std::vector<TangentField> energy_gradient(const PathGrid& path, SobolevOrder q,
                                          int oversample = 4);

struct SolveOptions {
    Index time_slices = 16;
    int max_iter = 500;
    double tol = 1e-6;  // stop when |grad| <= tol * (1 + energy)
    int oversample = 4;
    int lbfgs_memory = 8;
};

struct SolveReport {
    double distance_upper_bound = 0.0;
    double energy = 0.0;
    int iterations = 0;
    bool converged = false;
    double min_speed_along_path = 0.0;
    double min_length_along_path = 0.0;
    bool immersion_limited = false;  // line search stopped at the immersion boundary
};

/// Locally minimizes the path energy over interior slices from the linear
/// initial path (limited-memory quasi-Newton, backtracking line search that
/// rejects steps leaving the immersion set). Accepted iterations never
/// increase the energy. Non-convergence within max_iter is reported softly.
std::pair<PathGrid, SolveReport> solve_bvp(const DiscreteCurve& c0,
                                           const DiscreteCurve& c1, SobolevOrder q,
                                           const SolveOptions& opts = {});

/// Doubles (factor 2) or quadruples (factor 4) the time slices by midpoint
/// insertion; node positions at shared times are unchanged.
PathGrid refine_path(const PathGrid& path, int factor);

/// Variational time-stepper: marches the discrete Euler-Lagrange condition of
/// the midpoint energy with a Newton inner solve (residual tolerance 1e-10).
/// Requires q >= 1 and steps >= 2. The trajectory covers t in [0,1] with
/// initial velocity h0.
PathGrid discrete_exp(const DiscreteCurve& c0, const TangentField& h0, SobolevOrder q,
                      Index steps, int oversample = 4);

}  // namespace fracshape
