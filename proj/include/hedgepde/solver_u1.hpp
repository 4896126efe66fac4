#pragma once

#include "hedgepde/grid.hpp"
#include "hedgepde/model.hpp"

#include <vector>

namespace hedgepde {

/// Solves, forward in t = T - τ, the semilinear equation for u₁ = ln a:
///
///   ∂u₁/∂t = (k²x²/2) ∂²u₁/∂x² + g₁(x) ∂u₁/∂x + k²(½ - ρ²) x² (∂u₁/∂x)² - f(x)²,
///   u₁(0, x) = 0.
///
/// Each step is backward Euler. The quadratic gradient term is Picard-linearised
/// as (lagged central gradient)·(new gradient) and folded into the advection
/// velocity, which is then hybrid-upwinded, so every pass is one M-matrix
/// tridiagonal solve.
///
/// Closures: x = 0 carries the exact value -t f(0)² (every spatial coefficient
/// vanishes there); x = x_max uses u[n-1] = u[n-2].

struct PicardOptions {
    double tolerance = 1e-12;  ///< max-norm of the update between passes, relative once max|u| > 1
    int max_iterations = 50;
    /// Under-relaxation of each nonlinear pass. The plain lagged map contracts
    /// at roughly 0.55 per pass with alternating sign near |ρ| = 1.
    double relaxation = 0.7;
};

struct U1Step {
    Field1D field;
    int picard_iterations = 0;
};

/// One backward-Euler step of size dt from u_prev. The Picard loop starts
/// from `initial_guess` when given, else from u_prev. Throws SolverError on
/// Picard non-convergence or a non-finite result.
U1Step step_u1(const Field1D& u_prev, double dt, const ModelParams& params,
               const PicardOptions& options = {}, const Field1D* initial_guess = nullptr);

/// Picard seed for the next step: 2·current - previous.
Field1D extrapolate_u1(const Field1D& current, const Field1D& previous);

struct U1Trajectory {
    std::vector<Field1D> fields;          ///< n_steps + 1 entries, fields[0] ≡ 0
    std::vector<int> picard_iterations;   ///< one entry per step
};

/// Marches from t = 0 to t = T in n_steps equal steps.
U1Trajectory solve_u1(const ModelParams& params, const Grid1D& grid, int n_steps,
                      const PicardOptions& options = {});

}  // namespace hedgepde
