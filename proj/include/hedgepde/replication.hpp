#pragma once

#include "hedgepde/grid.hpp"
#include "hedgepde/model.hpp"
#include "hedgepde/solver_2d.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hedgepde {

/// a(0, σ) = exp(u₁(T, σ)). Deep in the small-σ region u₁ can fall below the
/// double exponent range, in which case the stored value underflows to 0
/// while u₁ itself stays finite.
Field1D extract_a0(const Field1D& u1_final);

/// D_z u₂ + ρk D_x u₂ (central inside, one-sided on the edges). Dividing by
/// P = e^z gives θ* = ∂b/∂P + (ρk/P) ∂b/∂σ.
Field2D theta_numerator(const Field2D& u2, const ModelParams& params);

/// θ*(0) on every node.
Field2D compute_theta0(const Field2D& u2_final, const ModelParams& params);

struct ReplicationResult {
    Field1D u1_final;
    Field1D a0_profile;
    Field2D theta0;
    double sigma_obs = 0.0;
    double p_obs = 0.0;
    double v0_star = 0.0;     ///< b(0) at the evaluation point
    double c0 = 0.0;          ///< interpolated u₃, before clamping
    double eps_star = 0.0;    ///< sqrt(max(c0, 0))
    double clamp_magnitude = 0.0;  ///< |c0| when c0 < 0, else 0
    bool clamp_flagged = false;    ///< clamp_magnitude > 1e-8

    /// J(0) = a(0)(V₀ - b(0))² + c(0) at the evaluation point.
    double value_function(double v0) const;
};

inline constexpr double kClampFlagThreshold = 1e-8;

/// Throws DomainError when the evaluation point is outside the grid hull.
ReplicationResult replication_summary(const SystemState& final_state, const ModelParams& params, double sigma_obs,
                                      double p_obs);

struct RhoSweep {
    Grid1D grid;
    std::vector<double> rhos;
    std::vector<std::optional<Field1D>> u1;  ///< final u₁ per ρ; empty where the solve failed
    std::vector<std::optional<Field1D>> a0;  ///< exp of u1
    std::vector<std::string> errors;         ///< one per ρ, empty on success

    bool all_succeeded() const;
};

inline const std::vector<double> kDefaultSweepRhos{-1.0, -0.5, 0.0, 0.5, 1.0};

/// Independent u₁ solves for each ρ (run concurrently on `threads` workers);
/// a failing ρ is recorded and the rest continue.
RhoSweep rho_sweep(const ModelParams& params, const std::vector<double>& rhos, const Grid1D& grid, int n_steps,
                   int threads = 1);

/// CSV: header comment, then "sigma,a_rho=<ρ>,..." and one row per σ node.
/// Failed columns are written as nan.
void write_sweep_csv(std::ostream& os, const RhoSweep& sweep, std::string_view config_hash);

}  // namespace hedgepde
