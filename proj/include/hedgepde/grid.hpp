#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace hedgepde {

/// Uniform volatility grid x_i = i·h on [0, x_max].
struct Grid1D {
    double x_max = 1.0;
    int n_x = 101;

    double h() const { return x_max / (n_x - 1); }
    double x(int i) const { return i == n_x - 1 ? x_max : i * h(); }

    /// Requires n_x ≥ 3 and x_max > sigma1.
    void validate(double sigma1) const;

    bool operator==(const Grid1D&) const = default;
};

/// Tensor grid in (x = σ, z = ln P). Row-major storage: index i·n_z + j.
struct Grid2D {
    Grid1D x_grid;
    double z_min = -4.0;
    double z_max = 4.0;
    int n_z = 101;

    int n_x() const { return x_grid.n_x; }
    double h_x() const { return x_grid.h(); }
    double h_z() const { return (z_max - z_min) / (n_z - 1); }
    double x(int i) const { return x_grid.x(i); }
    double z(int j) const { return j == n_z - 1 ? z_max : z_min + j * h_z(); }
    double y(int j) const { return std::exp(z(j)); }
    std::size_t size() const { return static_cast<std::size_t>(n_x()) * n_z; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * n_z + j; }

    /// Grid centred on ln(spot) with the given half width in log-price.
    static Grid2D centered(Grid1D x_grid, double spot, double z_half_width, int n_z);

    /// Requires n_z ≥ 3, z_min < z_max, and the Grid1D invariants.
    void validate(double sigma1) const;

    bool operator==(const Grid2D&) const = default;
};

/// Nodal values on a Grid1D at forward time t = T - τ.
struct Field1D {
    Grid1D grid;
    double t = 0.0;
    std::vector<double> values;

    Field1D() = default;
    Field1D(Grid1D g, double time, double fill = 0.0)
        : grid(g), t(time), values(static_cast<std::size_t>(g.n_x), fill) {}

    double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values[static_cast<std::size_t>(i)]; }
};

/// Nodal values on a Grid2D at forward time t = T - τ.
struct Field2D {
    Grid2D grid;
    double t = 0.0;
    std::vector<double> values;

    Field2D() = default;
    Field2D(Grid2D g, double time, double fill = 0.0)
        : grid(g), t(time), values(g.size(), fill) {}

    double operator()(int i, int j) const { return values[grid.index(i, j)]; }
    double& operator()(int i, int j) { return values[grid.index(i, j)]; }
};

enum class Difference { Central, Forward, Backward };

// Difference stencils. All throw DomainError for nodes where the stencil
// would leave the grid.

double d_dx(const Field1D& f, int i, Difference kind = Difference::Central);
double d2_dx2(const Field1D& f, int i);

/// One-sided difference for an advection term +v·∂u/∂x on the right-hand
/// side of ∂u/∂t: v > 0 carries information from larger x, so the forward
/// difference is used; v < 0 uses the backward difference.
double d_dx_upwind(const Field1D& f, int i, double velocity);

double d_dx(const Field2D& f, int i, int j, Difference kind = Difference::Central);
double d_dz(const Field2D& f, int i, int j, Difference kind = Difference::Central);
double d2_dx2(const Field2D& f, int i, int j);
double d2_dz2(const Field2D& f, int i, int j);
double d2_dxdz(const Field2D& f, int i, int j);

/// Linear interpolation on a Grid1D; throws DomainError outside [0, x_max].
double interpolate(const Field1D& f, double x);

/// Bilinear interpolation; throws DomainError outside the grid hull.
double interpolate(const Field2D& f, double x, double z);

/// Max-norm of a - b over all nodes.
double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace hedgepde
