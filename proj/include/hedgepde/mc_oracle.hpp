#pragma once

#include "hedgepde/model.hpp"
#include "hedgepde/payoff.hpp"
#include "hedgepde/solver_2d.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace hedgepde {

// Market dynamics matching the generator of the u₃ equation:
//   dσ = g(σ) dt + k σ dW₂,
//   dP = σ f(σ) P dt + σ P dW₁,   d⟨W₁, W₂⟩ = ρ dt,
// simulated with log-coordinate Euler–Maruyama so σ and P stay positive:
//   Δ ln σ = (-δ(σ - σ₁) - k²/2) Δt + k ΔW₂,
//   Δ ln P = (σ f(σ) - σ²/2) Δt + σ ΔW₁,   W₁ = ρ W₂ + √(1-ρ²) W⊥.

enum class HedgeStrategy {
    Tracking,  ///< θ = ∂b/∂P + (ρk/P) ∂b/∂σ along the path
    None,      ///< θ ≡ 0: hold V₀ in bonds
    Constant,  ///< θ ≡ SimConfig::constant_theta
};

struct SimConfig {
    int n_paths = 100000;
    int n_steps = 200;
    std::uint64_t seed = 20240917;
    HedgeStrategy strategy = HedgeStrategy::Tracking;
    double constant_theta = 0.0;
    bool zero_stock_drift = false;  ///< test hook: simulate with f ≡ 0

    /// n_paths ≥ 100, n_steps ≥ 10.
    void validate() const;
};

std::string strategy_name(HedgeStrategy s);

struct PathEnsemble {
    int n_paths = 0;
    int n_steps = 0;
    double dt = 0.0;
    std::vector<double> sigma;  ///< n_paths × (n_steps + 1), row per path
    std::vector<double> price;
    long overflow_count = 0;    ///< steps where ln P exceeded the double range guard

    double sigma_at(int path, int step) const { return sigma[static_cast<std::size_t>(path) * (n_steps + 1) + step]; }
    double price_at(int path, int step) const { return price[static_cast<std::size_t>(path) * (n_steps + 1) + step]; }
};

/// Full path storage; meant for diagnostics and tests with modest n_paths.
/// Path i depends only on (seed, i). Does not require k > 0, so the k = 0
/// deterministic-volatility limit can be simulated.
PathEnsemble simulate_paths(const ModelParams& params, const SimConfig& sim, double sigma_init, double p_init,
                            int threads = 1);

struct MCEstimate {
    double mean_squared_error = 0.0;  ///< E[(V(T) - F)²]
    double std_error = 0.0;
    double v0 = 0.0;
    double j0_pde = 0.0;              ///< a(0)(V₀ - b(0))² + c(0), filled by callers that know it
    double mean_terminal_wealth = 0.0;
    double terminal_wealth_std_error = 0.0;
    int n_paths = 0;
    long hull_excursions = 0;         ///< rebalancing dates where (σ, ln P) was clamped to the grid
    long paths_with_excursion = 0;
    long overflow_count = 0;
};

struct PathRecord {
    int path = 0;
    double terminal_price = 0.0;
    double terminal_sigma = 0.0;
    double terminal_wealth = 0.0;
    double error = 0.0;  ///< V(T) - F(P(T), σ(T))
};

/// Self-financing hedge along simulated paths started at (sigma_init, p_init)
/// with wealth V₀; ΔV = θ ΔP at zero interest. Tracking θ is read from the
/// retained u₂ states of `march` at PDE time t = T - τ (linear in time
/// between retained states, bilinear in (σ, ln P)). Summation is in path
/// order, so the estimate is bit-identical for any thread count.
MCEstimate run_hedge(const MarchResult& march, const ModelParams& params, const Payoff& payoff,
                     const SimConfig& sim, double sigma_init, double p_init, double v0, int threads = 1,
                     std::vector<PathRecord>* records = nullptr);

struct VerificationReport {
    ModelParams params;
    SimConfig sim;
    double sigma_obs = 0.0;
    double p_obs = 0.0;
    double b0 = 0.0;
    double c0 = 0.0;
    MCEstimate strategy;      ///< the configured strategy
    MCEstimate buy_and_hold;  ///< θ ≡ 0 baseline
    bool strategy_pass = false;
    bool buy_and_hold_pass = false;

    bool pass() const { return strategy_pass && buy_and_hold_pass; }
};

inline constexpr double kPdeErrorBudget = 0.05;  ///< relative slack on c(0)
inline constexpr double kStdErrorMultiplier = 3.0;

/// MC + 3·SE ≥ (1 - 0.05)·J₀.
bool lower_bound_holds(const MCEstimate& mc, double j0);

/// March the system, evaluate b(0), c(0) at the observation point and run the
/// configured strategy and the buy-and-hold baseline with V₀ = b(0).
VerificationReport verify(const ModelParams& params, const Payoff& payoff, const Grid2D& grid, int pde_steps,
                          const SimConfig& sim, double sigma_obs, double p_obs, int threads = 1,
                          std::vector<PathRecord>* records = nullptr);

/// Flat key=value block, one entry per line, after the config-hash header.
void write_verification_report(std::ostream& os, const VerificationReport& report, std::string_view config_hash);

void write_path_csv(std::ostream& os, const std::vector<PathRecord>& records, std::string_view config_hash);

}  // namespace hedgepde
