#include "hedgepde/solver_u1.hpp"

#include "hedgepde/errors.hpp"
#include "stencil_weights.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace hedgepde {

U1Step step_u1(const Field1D& u_prev, double dt, const ModelParams& params, const PicardOptions& options,
               const Field1D* initial_guess) {
    if (!(dt > 0.0)) throw ValidationError("time step must be > 0");
    const Grid1D& grid = u_prev.grid;
    const int n = grid.n_x;
    const double h = grid.h();
    const double k2 = params.k * params.k;
    // Coefficient of x²(∂u/∂x)² on the right-hand side. ρ = ±1/√2 does not
    // square to ½ exactly in binary, so a few ulps of slack count as linear.
    const double half_minus_rho2 = 0.5 - params.rho * params.rho;
    const bool linear = std::abs(half_minus_rho2) <= 4.0 * std::numeric_limits<double>::epsilon();
    const double quad = linear ? 0.0 : k2 * half_minus_rho2;

    std::vector<double> alpha(n), g1(n), f2(n);
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        alpha[i] = 0.5 * k2 * x * x;
        g1[i] = eval_g1(params, x);
        const double f = eval_f(params, x);
        f2[i] = f * f;
    }

    std::vector<double> lower(n), diag(n), upper(n), rhs(n);
    Field1D iterate = initial_guess != nullptr ? *initial_guess : u_prev;
    iterate.t = u_prev.t + dt;
    Field1D next = iterate;

    for (int pass = 1; pass <= options.max_iterations; ++pass) {
        // Degenerate boundary: du/dt = -f(0)².
        lower[0] = 0.0;
        diag[0] = 1.0;
        upper[0] = 0.0;
        rhs[0] = -dt * f2[0];
        for (int i = 1; i < n - 1; ++i) {
            // quad·x²·(∂u/∂x)² with one central gradient lagged acts as extra
            // advection; the total velocity is hybrid-upwinded.
            const double x = grid.x(i);
            const double lagged = (iterate[i + 1] - iterate[i - 1]) / (2.0 * h);
            const auto w = detail::diffusion_advection_weights(alpha[i], g1[i] + quad * x * x * lagged, h);
            lower[i] = -w.minus;
            upper[i] = -w.plus;
            diag[i] = 1.0 / dt + w.minus + w.plus;
            // Increment form: the operator acts on u_prev through differences,
            // so constants are reproduced exactly.
            rhs[i] = w.minus * (u_prev[i - 1] - u_prev[i]) + w.plus * (u_prev[i + 1] - u_prev[i]) - f2[i];
        }
        lower[n - 1] = -1.0;
        diag[n - 1] = 1.0;
        upper[n - 1] = 0.0;
        rhs[n - 1] = u_prev[n - 2] - u_prev[n - 1];

        detail::solve_tridiagonal(lower, diag, upper, rhs);

        double update = 0.0;
        double scale = 1.0;
        for (int i = 0; i < n; ++i) {
            next[i] = u_prev[i] + rhs[i];
            if (!std::isfinite(next[i])) throw SolverError("u1", -1, INFINITY, "non-finite value");
            update = std::max(update, std::abs(next[i] - iterate[i]));
            scale = std::max(scale, std::abs(next[i]));
        }
        // Absolute below |u| = 1, relative above: u₁ reaches O(10³) near
        // x = 0, where 1e-12 absolute is below the rounding of the solve.
        if (linear || update < options.tolerance * scale) return U1Step{std::move(next), pass};
        if (pass == options.max_iterations) {
            throw SolverError("u1", -1, update,
                              "Picard iteration did not converge (last update " + std::to_string(update) + ")");
        }
        for (int i = 0; i < n; ++i) iterate[i] += options.relaxation * (next[i] - iterate[i]);
    }
    return U1Step{std::move(iterate), options.max_iterations};
}

Field1D extrapolate_u1(const Field1D& current, const Field1D& previous) {
    Field1D guess = current;
    for (std::size_t i = 0; i < guess.values.size(); ++i) guess.values[i] = 2.0 * current.values[i] - previous.values[i];
    return guess;
}

U1Trajectory solve_u1(const ModelParams& params, const Grid1D& grid, int n_steps, const PicardOptions& options) {
    if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
    params.validate();
    grid.validate(params.sigma1);
    const double dt = params.T / n_steps;
    U1Trajectory traj;
    traj.fields.reserve(static_cast<std::size_t>(n_steps) + 1);
    traj.fields.emplace_back(grid, 0.0, 0.0);
    for (int n = 1; n <= n_steps; ++n) {
        try {
            std::optional<Field1D> guess;
            if (n >= 2) guess = extrapolate_u1(traj.fields[n - 1], traj.fields[n - 2]);
            auto step = step_u1(traj.fields.back(), dt, params, options, guess ? &*guess : nullptr);
            step.field.t = n == n_steps ? params.T : n * dt;
            traj.fields.push_back(std::move(step.field));
            traj.picard_iterations.push_back(step.picard_iterations);
        } catch (const SolverError& e) {
            throw e.at_step(n);
        }
    }
    return traj;
}

}  // namespace hedgepde
