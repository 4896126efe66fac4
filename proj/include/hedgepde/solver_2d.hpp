#pragma once

#include "hedgepde/grid.hpp"
#include "hedgepde/model.hpp"
#include "hedgepde/payoff.hpp"
#include "hedgepde/solver_u1.hpp"

#include <memory>
#include <span>
#include <vector>

namespace hedgepde {

// In x = σ, z = ln P and forward time t = T - τ, b = u₂ and c = u₃ satisfy
//
//   ∂u₂/∂t = (k²x²/2)∂²u₂/∂x² + (x²/2)∂²u₂/∂z² + ρk x² ∂²u₂/∂x∂z
//            + [g₂(x) + (1-ρ²)k²x² ∂u₁/∂x] ∂u₂/∂x - (x²/2) ∂u₂/∂z,
//
//   ∂u₃/∂t = (k²x²/2)∂²u₃/∂x² + (x²/2)∂²u₃/∂z² + ρk x² ∂²u₃/∂x∂z
//            + g(x) ∂u₃/∂x + (x f(x) - x²/2) ∂u₃/∂z + (1-ρ²)k²x² e^{u₁} (∂u₂/∂x)²,
//
// with u₂(0) = F(x, e^z), u₃(0) = 0. Both are stepped with backward Euler:
// diffusion and advection implicit on a 5-point M-matrix stencil, the mixed
// derivative explicit on the previous field, the u₃ source explicit on the
// freshest u₁ and u₂.

enum class RowKind : unsigned char {
    Interior,   ///< full 5-point stencil
    ZBoundary,  ///< z = z_min or z_max: only x-terms act (∂²/∂P² and ∂/∂P dropped)
    Frozen,     ///< x = 0: every coefficient vanishes, value kept
    Neumann,    ///< x = x_max: u[n-1, j] = u[n-2, j]
    Dirichlet,  ///< prescribed value (manufactured-solution runs)
};

/// Per-node weights of the implicit operator L, written in difference form
///   (L u)_ij = xm·(u[i-1,j] - u_ij) + xp·(u[i+1,j] - u_ij) + zm·(...) + zp·(...),
/// plus the coefficient of the explicit mixed derivative. All weights ≥ 0.
struct OperatorStencil {
    Grid2D grid;
    std::vector<RowKind> kind;
    std::vector<double> xm, xp, zm, zp;
    std::vector<double> cross;  ///< ρk x², zero on non-interior rows
};

enum class BoundaryClosure { Natural, Dirichlet };

/// Generic assembly from per-x-node advection velocities (the coefficients of
/// ∂u/∂x and ∂u/∂z on the right-hand side).
OperatorStencil assemble_operator(const ModelParams& params, const Grid2D& grid,
                                  std::span<const double> x_velocity, std::span<const double> z_velocity,
                                  BoundaryClosure closure = BoundaryClosure::Natural);

/// Operator of the b-equation; the x-velocity uses ∂u₁/∂x of `u1_next`.
OperatorStencil assemble_b_operator(const ModelParams& params, const Grid2D& grid, const Field1D& u1_next);

/// Operator of the c-equation (independent of time).
OperatorStencil assemble_c_operator(const ModelParams& params, const Grid2D& grid,
                                    BoundaryClosure closure = BoundaryClosure::Natural);

/// (L u) in difference form; zero on Frozen, Neumann and Dirichlet rows.
std::vector<double> apply_operator(const OperatorStencil& op, const Field2D& u);

/// ρk x² ∂²u/∂x∂z on interior rows (four-corner stencil), zero elsewhere.
std::vector<double> explicit_cross_term(const OperatorStencil& op, const Field2D& u);

/// BiCGSTAB uses a diagonal preconditioner; SparseLU suits small grids and
/// operators that are factorised once and reused.
enum class LinearSolverKind { BiCGSTAB, SparseLU };

struct LinearSolverOptions {
    LinearSolverKind kind = LinearSolverKind::BiCGSTAB;
    double relative_residual = 1e-10;
    int max_iterations = 2000;  ///< Krylov only
};

/// Factorised (or preconditioned) system I/dt - L for one operator and step size.
class ImplicitSystem {
public:
    ImplicitSystem(const OperatorStencil& op, double dt, LinearSolverOptions options = {});
    ~ImplicitSystem();
    ImplicitSystem(ImplicitSystem&&) noexcept;
    ImplicitSystem& operator=(ImplicitSystem&&) noexcept;

    /// Replaces the operator; reuses the sparsity analysis.
    void refactor(const OperatorStencil& op);

    /// Solves in place; throws SolverError when the relative residual exceeds
    /// the contract or the result is not finite.
    void solve(std::vector<double>& rhs_to_solution) const;

    double dt() const noexcept;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One implicit step u_prev → u_next with extra explicit terms `source`
/// (already evaluated) and, for Dirichlet rows, values `dirichlet_next`.
Field2D step_linear(const Field2D& u_prev, const OperatorStencil& op, const ImplicitSystem& system,
                    std::span<const double> source, const Field2D* dirichlet_next = nullptr);

/// All three unknowns at a common forward time.
struct SystemState {
    Field1D u1;
    Field2D u2;
    Field2D u3;

    double t() const { return u1.t; }
};

/// Initial state: u₁ = 0, u₂ = F(x, e^z), u₃ = 0.
SystemState initial_state(const Grid2D& grid, const Payoff& payoff);

/// One b step to t + dt; `u1_next` is the already advanced u₁.
Field2D step_b(const SystemState& state, const Field1D& u1_next, double dt, const ModelParams& params,
               const LinearSolverOptions& options = {});

/// The u₃ source (1-ρ²)k²x² e^{u₁}(∂u₂/∂x)², central in x; zero where the
/// row is Frozen, Neumann or Dirichlet. (1-ρ²) is formed first, so the
/// source is exactly zero for ρ = ±1.
std::vector<double> c_source(const ModelParams& params, const OperatorStencil& op, const Field1D& u1,
                             const Field2D& u2);

/// One c step to t + dt using the advanced u₁ and u₂.
Field2D step_c(const SystemState& state, const Field1D& u1_next, const Field2D& u2_next, double dt,
               const ModelParams& params, const LinearSolverOptions& options = {});

struct MarchOptions {
    int retain_stride = 1;  ///< keep every m-th state; the first and last are always kept
    PicardOptions picard;
    LinearSolverOptions linear;
};

struct MarchResult {
    std::vector<SystemState> states;  ///< retained states in time order
    std::vector<int> steps;           ///< step index of each retained state
    std::vector<int> picard_iterations;
    double min_u3 = 0.0;              ///< over every node of every step
    double dt = 0.0;

    const SystemState& final_state() const { return states.back(); }
};

/// Lockstep march: per step u₁, then u₂ with u₁ⁿ⁺¹, then u₃ with u₁ⁿ⁺¹, u₂ⁿ⁺¹.
/// Failures are rethrown as SolverError tagged with equation and step.
MarchResult march_system(const ModelParams& params, const Grid2D& grid, const Payoff& payoff, int n_steps,
                         const MarchOptions& options = {});

}  // namespace hedgepde
