#include "hedgepde/solver_2d.hpp"

#include "hedgepde/errors.hpp"
#include "stencil_weights.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <cmath>
#include <optional>

namespace hedgepde {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Vector = Eigen::VectorXd;

RowKind row_kind(const Grid2D& g, int i, int j, BoundaryClosure closure) {
    const bool x_edge = i == 0 || i == g.n_x() - 1;
    const bool z_edge = j == 0 || j == g.n_z - 1;
    if (closure == BoundaryClosure::Dirichlet) return x_edge || z_edge ? RowKind::Dirichlet : RowKind::Interior;
    if (i == 0) return RowKind::Frozen;
    if (i == g.n_x() - 1) return RowKind::Neumann;
    return z_edge ? RowKind::ZBoundary : RowKind::Interior;
}

SparseMatrix build_matrix(const OperatorStencil& op, double dt) {
    const Grid2D& g = op.grid;
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(g.size() * 5);
    for (int i = 0; i < g.n_x(); ++i) {
        for (int j = 0; j < g.n_z; ++j) {
            const auto r = static_cast<int>(g.index(i, j));
            switch (op.kind[r]) {
            case RowKind::Frozen:
            case RowKind::Dirichlet:
                triplets.emplace_back(r, r, 1.0);
                break;
            case RowKind::Neumann:
                triplets.emplace_back(r, r, 1.0);
                triplets.emplace_back(r, static_cast<int>(g.index(i - 1, j)), -1.0);
                break;
            case RowKind::ZBoundary:
                triplets.emplace_back(r, r, 1.0 / dt + op.xm[r] + op.xp[r]);
                triplets.emplace_back(r, static_cast<int>(g.index(i - 1, j)), -op.xm[r]);
                triplets.emplace_back(r, static_cast<int>(g.index(i + 1, j)), -op.xp[r]);
                break;
            case RowKind::Interior:
                triplets.emplace_back(r, r, 1.0 / dt + op.xm[r] + op.xp[r] + op.zm[r] + op.zp[r]);
                triplets.emplace_back(r, static_cast<int>(g.index(i - 1, j)), -op.xm[r]);
                triplets.emplace_back(r, static_cast<int>(g.index(i + 1, j)), -op.xp[r]);
                triplets.emplace_back(r, static_cast<int>(g.index(i, j - 1)), -op.zm[r]);
                triplets.emplace_back(r, static_cast<int>(g.index(i, j + 1)), -op.zp[r]);
                break;
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    SparseMatrix a(n, n);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    return a;
}

void check_finite(const std::vector<double>& v, const char* equation) {
    for (double x : v) {
        if (!std::isfinite(x)) throw SolverError(equation, -1, INFINITY, "non-finite value");
    }
}

}  // namespace

OperatorStencil assemble_operator(const ModelParams& params, const Grid2D& grid,
                                  std::span<const double> x_velocity, std::span<const double> z_velocity,
                                  BoundaryClosure closure) {
    const std::size_t n = grid.size();
    OperatorStencil op{grid, std::vector<RowKind>(n), std::vector<double>(n), std::vector<double>(n),
                       std::vector<double>(n), std::vector<double>(n), std::vector<double>(n)};
    const double hx = grid.h_x();
    const double hz = grid.h_z();
    const double k2 = params.k * params.k;
    for (int i = 0; i < grid.n_x(); ++i) {
        const double x = grid.x(i);
        const double x2 = x * x;
        const auto wx = detail::diffusion_advection_weights(0.5 * k2 * x2, x_velocity[i], hx);
        const auto wz = detail::diffusion_advection_weights(0.5 * x2, z_velocity[i], hz);
        for (int j = 0; j < grid.n_z; ++j) {
            const std::size_t r = grid.index(i, j);
            const RowKind kind = row_kind(grid, i, j, closure);
            op.kind[r] = kind;
            if (kind == RowKind::Interior || kind == RowKind::ZBoundary) {
                op.xm[r] = wx.minus;
                op.xp[r] = wx.plus;
            }
            if (kind == RowKind::Interior) {
                op.zm[r] = wz.minus;
                op.zp[r] = wz.plus;
                op.cross[r] = params.rho * params.k * x2;
            }
        }
    }
    return op;
}

OperatorStencil assemble_b_operator(const ModelParams& params, const Grid2D& grid, const Field1D& u1_next) {
    const int n = grid.n_x();
    if (u1_next.grid.n_x != n) throw DomainError("u1 field does not match the x-grid");
    const double coupling = (1.0 - params.rho * params.rho) * params.k * params.k;
    std::vector<double> vx(n), vz(n);
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        const double du1 = i > 0 && i < n - 1 ? d_dx(u1_next, i) : 0.0;
        vx[i] = eval_g2(params, x) + coupling * x * x * du1;
        vz[i] = -0.5 * x * x;
    }
    return assemble_operator(params, grid, vx, vz);
}

OperatorStencil assemble_c_operator(const ModelParams& params, const Grid2D& grid, BoundaryClosure closure) {
    const int n = grid.n_x();
    std::vector<double> vx(n), vz(n);
    for (int i = 0; i < n; ++i) {
        const double x = grid.x(i);
        vx[i] = eval_g(params, x);
        vz[i] = eval_xf(params, x) - 0.5 * x * x;
    }
    return assemble_operator(params, grid, vx, vz, closure);
}

std::vector<double> apply_operator(const OperatorStencil& op, const Field2D& u) {
    const Grid2D& g = op.grid;
    std::vector<double> out(g.size(), 0.0);
    for (int i = 0; i < g.n_x(); ++i) {
        for (int j = 0; j < g.n_z; ++j) {
            const std::size_t r = g.index(i, j);
            const RowKind kind = op.kind[r];
            if (kind != RowKind::Interior && kind != RowKind::ZBoundary) continue;
            const double c = u(i, j);
            double acc = op.xm[r] * (u(i - 1, j) - c) + op.xp[r] * (u(i + 1, j) - c);
            if (kind == RowKind::Interior) acc += op.zm[r] * (u(i, j - 1) - c) + op.zp[r] * (u(i, j + 1) - c);
            out[r] = acc;
        }
    }
    return out;
}

std::vector<double> explicit_cross_term(const OperatorStencil& op, const Field2D& u) {
    const Grid2D& g = op.grid;
    std::vector<double> out(g.size(), 0.0);
    for (int i = 1; i < g.n_x() - 1; ++i) {
        for (int j = 1; j < g.n_z - 1; ++j) {
            const std::size_t r = g.index(i, j);
            if (op.kind[r] == RowKind::Interior && op.cross[r] != 0.0) out[r] = op.cross[r] * d2_dxdz(u, i, j);
        }
    }
    return out;
}

struct ImplicitSystem::Impl {
    double dt;
    LinearSolverOptions options;
    SparseMatrix matrix;
    std::optional<Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>>> lu;
    std::optional<Eigen::BiCGSTAB<SparseMatrix, Eigen::DiagonalPreconditioner<double>>> krylov;

    void factor(bool analyse) {
        if (options.kind == LinearSolverKind::SparseLU) {
            if (analyse) {
                lu.emplace();
                lu->analyzePattern(matrix);
            }
            lu->factorize(matrix);
            if (lu->info() != Eigen::Success) throw SolverError("linear", -1, INFINITY, "sparse LU failed");
        } else {
            krylov.emplace();
            krylov->setTolerance(options.relative_residual * 0.1);
            krylov->setMaxIterations(options.max_iterations);
            krylov->compute(matrix);
            if (krylov->info() != Eigen::Success)
                throw SolverError("linear", -1, INFINITY, "Krylov setup failed");
        }
    }
};

ImplicitSystem::ImplicitSystem(const OperatorStencil& op, double dt, LinearSolverOptions options)
    : impl_(std::make_unique<Impl>()) {
    if (!(dt > 0.0)) throw ValidationError("time step must be > 0");
    impl_->dt = dt;
    impl_->options = options;
    impl_->matrix = build_matrix(op, dt);
    impl_->factor(true);
}

ImplicitSystem::~ImplicitSystem() = default;
ImplicitSystem::ImplicitSystem(ImplicitSystem&&) noexcept = default;
ImplicitSystem& ImplicitSystem::operator=(ImplicitSystem&&) noexcept = default;

void ImplicitSystem::refactor(const OperatorStencil& op) {
    impl_->matrix = build_matrix(op, impl_->dt);
    impl_->factor(false);
}

double ImplicitSystem::dt() const noexcept { return impl_->dt; }

void ImplicitSystem::solve(std::vector<double>& rhs_to_solution) const {
    const auto n = static_cast<Eigen::Index>(rhs_to_solution.size());
    Eigen::Map<Vector> b(rhs_to_solution.data(), n);
    const double b_norm = b.norm();
    if (b_norm == 0.0) return;  // the system is nonsingular: zero in, zero out
    Vector x;
    if (impl_->options.kind == LinearSolverKind::SparseLU) {
        x = impl_->lu->solve(b);
    } else {
        x = impl_->krylov->solve(b);
    }
    const double residual = (b - impl_->matrix * x).norm() / b_norm;
    if (!x.allFinite()) throw SolverError("linear", -1, residual, "non-finite solution");
    if (!(residual < impl_->options.relative_residual)) {
        throw SolverError("linear", -1, residual,
                          "relative residual " + std::to_string(residual) + " above tolerance");
    }
    b = x;
}

Field2D step_linear(const Field2D& u_prev, const OperatorStencil& op, const ImplicitSystem& system,
                    std::span<const double> source, const Field2D* dirichlet_next) {
    const Grid2D& g = op.grid;
    if (!(u_prev.grid == g)) throw DomainError("field and operator grids differ");
    std::vector<double> rhs = apply_operator(op, u_prev);
    for (int i = 0; i < g.n_x(); ++i) {
        for (int j = 0; j < g.n_z; ++j) {
            const std::size_t r = g.index(i, j);
            switch (op.kind[r]) {
            case RowKind::Interior:
            case RowKind::ZBoundary:
                if (!source.empty()) rhs[r] += source[r];
                break;
            case RowKind::Frozen:
                rhs[r] = 0.0;
                break;
            case RowKind::Neumann:
                rhs[r] = u_prev(i - 1, j) - u_prev(i, j);
                break;
            case RowKind::Dirichlet:
                if (dirichlet_next == nullptr) throw DomainError("Dirichlet rows need boundary values");
                rhs[r] = (*dirichlet_next)(i, j) - u_prev(i, j);
                break;
            }
        }
    }
    system.solve(rhs);
    Field2D next(g, u_prev.t + system.dt());
    for (std::size_t r = 0; r < rhs.size(); ++r) next.values[r] = u_prev.values[r] + rhs[r];
    if (dirichlet_next != nullptr) {
        // Prescribed rows carry the boundary values exactly.
        for (std::size_t r = 0; r < rhs.size(); ++r)
            if (op.kind[r] == RowKind::Dirichlet) next.values[r] = dirichlet_next->values[r];
    }
    return next;
}

SystemState initial_state(const Grid2D& grid, const Payoff& payoff) {
    SystemState s{Field1D(grid.x_grid, 0.0, 0.0), Field2D(grid, 0.0), Field2D(grid, 0.0, 0.0)};
    for (int i = 0; i < grid.n_x(); ++i) {
        for (int j = 0; j < grid.n_z; ++j) s.u2(i, j) = eval_payoff(payoff, grid.x(i), grid.y(j));
    }
    return s;
}

std::vector<double> c_source(const ModelParams& params, const OperatorStencil& op, const Field1D& u1,
                             const Field2D& u2) {
    const Grid2D& g = op.grid;
    const double incompleteness = (1.0 - params.rho * params.rho) * params.k * params.k;
    std::vector<double> s(g.size(), 0.0);
    if (incompleteness == 0.0) return s;
    for (int i = 1; i < g.n_x() - 1; ++i) {
        const double x = g.x(i);
        const double weight = incompleteness * x * x * std::exp(u1[i]);
        for (int j = 0; j < g.n_z; ++j) {
            const std::size_t r = g.index(i, j);
            if (op.kind[r] != RowKind::Interior && op.kind[r] != RowKind::ZBoundary) continue;
            const double du2 = d_dx(u2, i, j);
            s[r] = weight * du2 * du2;
        }
    }
    return s;
}

namespace {

Field2D advance_b(const SystemState& state, const OperatorStencil& op, const ImplicitSystem& system) {
    const auto cross = explicit_cross_term(op, state.u2);
    auto next = step_linear(state.u2, op, system, cross);
    check_finite(next.values, "b");
    return next;
}

Field2D advance_c(const ModelParams& params, const SystemState& state, const OperatorStencil& op,
                  const ImplicitSystem& system, const Field1D& u1_next, const Field2D& u2_next) {
    auto source = explicit_cross_term(op, state.u3);
    const auto s = c_source(params, op, u1_next, u2_next);
    for (std::size_t r = 0; r < source.size(); ++r) source[r] += s[r];
    auto next = step_linear(state.u3, op, system, source);
    check_finite(next.values, "c");
    return next;
}

// Re-tags linear-solver failures with the equation being advanced.
template <class Fn>
auto tagged(const char* equation, Fn&& fn) {
    try {
        return fn();
    } catch (const SolverError& e) {
        throw SolverError(equation, e.step(), e.residual(), e.detail());
    }
}

}  // namespace

Field2D step_b(const SystemState& state, const Field1D& u1_next, double dt, const ModelParams& params,
               const LinearSolverOptions& options) {
    return tagged("b", [&] {
        const auto op = assemble_b_operator(params, state.u2.grid, u1_next);
        const ImplicitSystem system(op, dt, options);
        return advance_b(state, op, system);
    });
}

Field2D step_c(const SystemState& state, const Field1D& u1_next, const Field2D& u2_next, double dt,
               const ModelParams& params, const LinearSolverOptions& options) {
    return tagged("c", [&] {
        const auto op = assemble_c_operator(params, state.u3.grid);
        const ImplicitSystem system(op, dt, options);
        return advance_c(params, state, op, system, u1_next, u2_next);
    });
}

MarchResult march_system(const ModelParams& params, const Grid2D& grid, const Payoff& payoff, int n_steps,
                         const MarchOptions& options) {
    if (n_steps < 1) throw ValidationError("n_steps must be >= 1");
    if (options.retain_stride < 1) throw ValidationError("retain_stride must be >= 1");
    params.validate();
    grid.validate(params.sigma1);
    validate_payoff(payoff);

    MarchResult result;
    result.dt = params.T / n_steps;
    const double dt = result.dt;

    SystemState state = initial_state(grid, payoff);
    result.states.push_back(state);
    result.steps.push_back(0);

    const auto c_op = assemble_c_operator(params, grid);
    const ImplicitSystem c_system = tagged("c", [&] { return ImplicitSystem(c_op, dt, options.linear); });
    std::optional<ImplicitSystem> b_system;
    Field1D u1_before = state.u1;

    for (int n = 1; n <= n_steps; ++n) {
        const double t_next = n == n_steps ? params.T : n * dt;
        try {
            std::optional<Field1D> guess;
            if (n >= 2) guess = extrapolate_u1(state.u1, u1_before);
            U1Step u1 = step_u1(state.u1, dt, params, options.picard, guess ? &*guess : nullptr);
            u1.field.t = t_next;
            result.picard_iterations.push_back(u1.picard_iterations);

            Field2D u2 = tagged("b", [&] {
                const auto b_op = assemble_b_operator(params, grid, u1.field);
                if (b_system) {
                    b_system->refactor(b_op);
                } else {
                    b_system.emplace(b_op, dt, options.linear);
                }
                return advance_b(state, b_op, *b_system);
            });
            u2.t = t_next;

            Field2D u3 = tagged("c", [&] { return advance_c(params, state, c_op, c_system, u1.field, u2); });
            u3.t = t_next;

            for (double v : u3.values) result.min_u3 = std::min(result.min_u3, v);
            u1_before = state.u1;
            state = SystemState{std::move(u1.field), std::move(u2), std::move(u3)};
        } catch (const SolverError& e) {
            throw e.at_step(n);
        }
        if (n % options.retain_stride == 0 || n == n_steps) {
            result.states.push_back(state);
            result.steps.push_back(n);
        }
    }
    return result;
}

}  // namespace hedgepde
