#include "hedgepde/convergence.hpp"

#include "hedgepde/errors.hpp"

#include <cmath>
#include <numbers>

namespace hedgepde {

double ManufacturedSolution::value(double t, double x, double z) const {
    return std::sin(std::numbers::pi * x / x_max) * std::cos(z) * std::exp(-t);
}

double ManufacturedSolution::forcing(double t, double x, double z) const {
    const double a = std::numbers::pi / x_max;
    const double e = std::exp(-t);
    const double s = std::sin(a * x), c = std::cos(a * x);
    const double cz = std::cos(z), sz = std::sin(z);
    const double u = s * cz * e;
    const double u_x = a * c * cz * e;
    const double u_xx = -a * a * u;
    const double u_z = -s * sz * e;
    const double u_zz = -u;
    const double u_xz = -a * c * sz * e;
    const double k2 = params.k * params.k;
    const double lu = 0.5 * k2 * x * x * u_xx + 0.5 * x * x * u_zz + params.rho * params.k * x * x * u_xz +
                      eval_g(params, x) * u_x + (eval_xf(params, x) - 0.5 * x * x) * u_z;
    return -u - lu;
}

Field2D ManufacturedSolution::sample(const Grid2D& grid, double t) const {
    Field2D f(grid, t);
    for (int i = 0; i < grid.n_x(); ++i)
        for (int j = 0; j < grid.n_z; ++j) f(i, j) = value(t, grid.x(i), grid.z(j));
    return f;
}

Field2D solve_manufactured(const ManufacturedSolution& ms, const Grid2D& grid, int n_steps,
                           const LinearSolverOptions& linear) {
    if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
    const double dt = ms.params.T / n_steps;
    const auto op = assemble_c_operator(ms.params, grid, BoundaryClosure::Dirichlet);
    const ImplicitSystem system(op, dt, linear);
    Field2D u = ms.sample(grid, 0.0);
    std::vector<double> source(grid.size());
    for (int n = 1; n <= n_steps; ++n) {
        const double t_next = n == n_steps ? ms.params.T : n * dt;
        source = explicit_cross_term(op, u);
        for (int i = 0; i < grid.n_x(); ++i)
            for (int j = 0; j < grid.n_z; ++j)
                source[grid.index(i, j)] += ms.forcing(t_next, grid.x(i), grid.z(j));
        const Field2D boundary = ms.sample(grid, t_next);
        try {
            u = step_linear(u, op, system, source, &boundary);
        } catch (const SolverError& e) {
            throw SolverError("manufactured", n, e.residual(), e.detail());
        }
        u.t = t_next;
    }
    return u;
}

namespace {

Grid2D square_grid(double x_max, int nodes, const ConvergenceSetup& s) {
    return Grid2D{Grid1D{x_max, nodes}, s.z_center - s.z_half_width, s.z_center + s.z_half_width, nodes};
}

double error_vs_exact(const ManufacturedSolution& ms, const Field2D& u) {
    return max_abs_diff(u.values, ms.sample(u.grid, u.t).values);
}

// Max-norm of coarse - fine over the coarse nodes; fine has 2n-1 nodes per axis.
double nested_difference(const Field2D& coarse, const Field2D& fine) {
    double m = 0.0;
    for (int i = 0; i < coarse.grid.n_x(); ++i)
        for (int j = 0; j < coarse.grid.n_z; ++j) m = std::max(m, std::abs(coarse(i, j) - fine(2 * i, 2 * j)));
    return m;
}

}  // namespace

ConvergenceReport run_convergence_study(const ModelParams& params, double x_max, const ConvergenceSetup& setup,
                                        const LinearSolverOptions& linear) {
    params.validate();
    const ManufacturedSolution ms{params, x_max};
    ConvergenceReport report;

    const Grid2D tgrid = square_grid(x_max, setup.time_grid_nodes, setup);
    std::vector<Field2D> tsol;
    for (int level = 0; level < 3; ++level) {
        const int steps = setup.time_base_steps << level;
        tsol.push_back(solve_manufactured(ms, tgrid, steps, linear));
        report.time_runs.push_back(ConvergenceRun{tgrid.n_x(), tgrid.n_z, steps, tgrid.h_x(), params.T / steps,
                                                  error_vs_exact(ms, tsol.back()), 0.0});
    }
    for (int level = 0; level < 2; ++level)
        report.time_runs[level].self_difference = max_abs_diff(tsol[level].values, tsol[level + 1].values);
    report.time_order = std::log2(report.time_runs[0].self_difference / report.time_runs[1].self_difference);

    std::vector<Field2D> ssol;
    int nodes = setup.space_base_nodes;
    for (int level = 0; level < 3; ++level) {
        const Grid2D grid = square_grid(x_max, nodes, setup);
        ssol.push_back(solve_manufactured(ms, grid, setup.space_steps, linear));
        report.space_runs.push_back(ConvergenceRun{grid.n_x(), grid.n_z, setup.space_steps, grid.h_x(),
                                                   params.T / setup.space_steps, error_vs_exact(ms, ssol.back()),
                                                   0.0});
        nodes = 2 * nodes - 1;
    }
    for (int level = 0; level < 2; ++level)
        report.space_runs[level].self_difference = nested_difference(ssol[level], ssol[level + 1]);
    report.space_order = std::log2(report.space_runs[0].self_difference / report.space_runs[1].self_difference);
    return report;
}

}  // namespace hedgepde
