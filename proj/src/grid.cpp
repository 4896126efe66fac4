#include "hedgepde/grid.hpp"

#include "hedgepde/errors.hpp"

#include <algorithm>
#include <string>

namespace hedgepde {

void Grid1D::validate(double sigma1) const {
    if (n_x < 3) throw ValidationError("n_x must be >= 3");
    if (!(x_max > sigma1) || !std::isfinite(x_max)) throw ValidationError("x_max must exceed sigma1");
}

Grid2D Grid2D::centered(Grid1D x_grid, double spot, double z_half_width, int n_z) {
    const double z0 = std::log(spot);
    return Grid2D{x_grid, z0 - z_half_width, z0 + z_half_width, n_z};
}

void Grid2D::validate(double sigma1) const {
    x_grid.validate(sigma1);
    if (n_z < 3) throw ValidationError("n_z must be >= 3");
    if (!(z_min < z_max) || !std::isfinite(z_min) || !std::isfinite(z_max))
        throw ValidationError("z_min must be < z_max");
}

namespace {

void check_range(int i, int lo, int hi, const char* axis) {
    if (i < lo || i > hi) {
        throw DomainError(std::string("stencil node out of range along ") + axis + ": " + std::to_string(i));
    }
}

// Generic difference along a strided line of values.
template <class Get>
double first_difference(Get get, int i, int n, double h, Difference kind, const char* axis) {
    switch (kind) {
    case Difference::Central:
        check_range(i, 1, n - 2, axis);
        return (get(i + 1) - get(i - 1)) / (2.0 * h);
    case Difference::Forward:
        check_range(i, 0, n - 2, axis);
        return (get(i + 1) - get(i)) / h;
    case Difference::Backward:
        check_range(i, 1, n - 1, axis);
        return (get(i) - get(i - 1)) / h;
    }
    return 0.0;
}

template <class Get>
double second_difference(Get get, int i, int n, double h, const char* axis) {
    check_range(i, 1, n - 2, axis);
    return (get(i + 1) - 2.0 * get(i) + get(i - 1)) / (h * h);
}

std::pair<int, double> cell(double q, double lo, double h, int n) {
    int i = static_cast<int>(std::floor((q - lo) / h));
    i = std::clamp(i, 0, n - 2);
    return {i, (q - (lo + i * h)) / h};
}

}  // namespace

double d_dx(const Field1D& f, int i, Difference kind) {
    return first_difference([&](int k) { return f[k]; }, i, f.grid.n_x, f.grid.h(), kind, "x");
}

double d2_dx2(const Field1D& f, int i) {
    return second_difference([&](int k) { return f[k]; }, i, f.grid.n_x, f.grid.h(), "x");
}

double d_dx_upwind(const Field1D& f, int i, double velocity) {
    return d_dx(f, i, velocity > 0.0 ? Difference::Forward : Difference::Backward);
}

double d_dx(const Field2D& f, int i, int j, Difference kind) {
    check_range(j, 0, f.grid.n_z - 1, "z");
    return first_difference([&](int k) { return f(k, j); }, i, f.grid.n_x(), f.grid.h_x(), kind, "x");
}

double d_dz(const Field2D& f, int i, int j, Difference kind) {
    check_range(i, 0, f.grid.n_x() - 1, "x");
    return first_difference([&](int k) { return f(i, k); }, j, f.grid.n_z, f.grid.h_z(), kind, "z");
}

double d2_dx2(const Field2D& f, int i, int j) {
    check_range(j, 0, f.grid.n_z - 1, "z");
    return second_difference([&](int k) { return f(k, j); }, i, f.grid.n_x(), f.grid.h_x(), "x");
}

double d2_dz2(const Field2D& f, int i, int j) {
    check_range(i, 0, f.grid.n_x() - 1, "x");
    return second_difference([&](int k) { return f(i, k); }, j, f.grid.n_z, f.grid.h_z(), "z");
}

double d2_dxdz(const Field2D& f, int i, int j) {
    check_range(i, 1, f.grid.n_x() - 2, "x");
    check_range(j, 1, f.grid.n_z - 2, "z");
    return (f(i + 1, j + 1) - f(i + 1, j - 1) - f(i - 1, j + 1) + f(i - 1, j - 1)) /
           (4.0 * f.grid.h_x() * f.grid.h_z());
}

double interpolate(const Field1D& f, double x) {
    if (!(x >= 0.0 && x <= f.grid.x_max)) throw DomainError("interpolation point outside the grid");
    const auto [i, s] = cell(x, 0.0, f.grid.h(), f.grid.n_x);
    return (1.0 - s) * f[i] + s * f[i + 1];
}

double interpolate(const Field2D& f, double x, double z) {
    const Grid2D& g = f.grid;
    if (!(x >= 0.0 && x <= g.x_grid.x_max && z >= g.z_min && z <= g.z_max)) {
        throw DomainError("interpolation point outside the grid hull");
    }
    const auto [i, s] = cell(x, 0.0, g.h_x(), g.n_x());
    const auto [j, r] = cell(z, g.z_min, g.h_z(), g.n_z);
    return (1.0 - s) * ((1.0 - r) * f(i, j) + r * f(i, j + 1)) +
           s * ((1.0 - r) * f(i + 1, j) + r * f(i + 1, j + 1));
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace hedgepde
