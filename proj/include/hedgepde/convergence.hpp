#pragma once

#include "hedgepde/grid.hpp"
#include "hedgepde/model.hpp"
#include "hedgepde/solver_2d.hpp"

#include <vector>

namespace hedgepde {

/// Smooth manufactured solution ū(t, x, z) = sin(πx/x_max)·cos(z)·e^{-t}
/// for the u₃ operator (diffusion, mixed derivative, both advections).
struct ManufacturedSolution {
    ModelParams params;
    double x_max = 1.0;

    double value(double t, double x, double z) const;

    /// ∂ū/∂t - Lū, injected as the source so that ū solves the discrete problem
    /// up to truncation error.
    double forcing(double t, double x, double z) const;

    Field2D sample(const Grid2D& grid, double t) const;
};

/// Backward-Euler march of the manufactured problem with Dirichlet data from ū.
Field2D solve_manufactured(const ManufacturedSolution& ms, const Grid2D& grid, int n_steps,
                           const LinearSolverOptions& linear = {});

struct ConvergenceRun {
    int n_x = 0;
    int n_z = 0;
    int n_steps = 0;
    double h_x = 0.0;
    double dt = 0.0;
    double error_vs_exact = 0.0;  ///< max-norm against ū at t = T (informational)
    double self_difference = 0.0; ///< max-norm against the next refinement, on this run's nodes
};

struct ConvergenceReport {
    std::vector<ConvergenceRun> time_runs;   ///< dt, dt/2, dt/4 on a fixed grid
    std::vector<ConvergenceRun> space_runs;  ///< h, h/2, h/4 at a fixed dt
    double time_order = 0.0;   ///< log2 of successive self-difference ratio
    double space_order = 0.0;
};

struct ConvergenceSetup {
    int time_grid_nodes = 41;   ///< n_x = n_z for the time study
    int time_base_steps = 10;
    int space_base_nodes = 21;  ///< coarsest n_x = n_z; refined as 2n-1, 4n-3
    int space_steps = 20;
    double z_center = 0.0;
    double z_half_width = 4.0;
};

/// Two halvings in dt and two in h. Orders come from Richardson ratios of
/// successive self-differences, so the common error of the other variable
/// cancels to leading order.
ConvergenceReport run_convergence_study(const ModelParams& params, double x_max, const ConvergenceSetup& setup,
                                        const LinearSolverOptions& linear = {});

}  // namespace hedgepde
