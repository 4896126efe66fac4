#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace hedgepde::detail {

/// Neighbour weights of a 3-point diffusion–advection stencil written as
///   α u'' + v u'  ≈  minus·(u[i-1] - u[i]) + plus·(u[i+1] - u[i]).
/// Hybrid differencing: central while the cell Péclet number |v|h/(2α) ≤ 1,
/// pure upwind beyond. The weights are continuous in v (so a lagged velocity
/// does not make Picard passes jump between stencils) and always ≥ 0, which
/// makes the implicit matrix an M-matrix.
struct NeighbourWeights {
    double minus = 0.0;
    double plus = 0.0;
};

inline NeighbourWeights diffusion_advection_weights(double alpha, double velocity, double h) {
    const double diff = alpha / (h * h);
    const double adv = velocity / (2.0 * h);
    return {std::max({-velocity / h, diff - adv, 0.0}), std::max({velocity / h, diff + adv, 0.0})};
}

/// Thomas algorithm for a diagonally dominant tridiagonal system; solves in
/// place into `rhs`. `lower[0]` and `upper[n-1]` are ignored.
inline void solve_tridiagonal(const std::vector<double>& lower, const std::vector<double>& diag,
                              const std::vector<double>& upper, std::vector<double>& rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double beta = diag[0];
    rhs[0] /= beta;
    for (std::size_t i = 1; i < n; ++i) {
        c[i - 1] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i - 1];
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / beta;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

}  // namespace hedgepde::detail
