#pragma once

namespace hedgepde {

/// Market and model constants. Volatility follows
///   dσ = g(σ) dt + k σ dW₂,   g(σ) = -δ σ (σ - σ₁),
/// and the stock dP = σ f(σ) P dt + σ P dW₁ with corr(dW₁, dW₂) = ρ.
/// Defaults: T = 1 and ρ = 0.
struct ModelParams {
    double k = 0.4;        ///< vol-of-vol
    double rho = 0.0;      ///< correlation, [-1, 1]
    double delta = 2.0;    ///< mean-reversion speed
    double sigma1 = 0.153; ///< long-run volatility, (0, 1)
    double mu = 0.7;       ///< stock drift
    double sigma0 = 0.01;  ///< cutoff below which f is frozen
    double T = 1.0;        ///< maturity

    /// Throws ValidationError naming the first violated bound.
    void validate() const;

    bool operator==(const ModelParams&) const = default;
};

/// Drift-to-volatility ratio: μ/σ₀ for x ≤ σ₀, μ/x above.
double eval_f(const ModelParams& p, double x);

/// Volatility drift g(x) = -δ x (x - σ₁).
double eval_g(const ModelParams& p, double x);

/// g₁(x) = g(x) - 2ρk x f(x), the drift seen by ln a.
double eval_g1(const ModelParams& p, double x);

/// g₂(x) = g(x) - ρk x f(x), the drift seen by b.
double eval_g2(const ModelParams& p, double x);

/// x f(x) = μ min(x/σ₀, 1); the stock's drift rate in the volatility state x.
double eval_xf(const ModelParams& p, double x);

}  // namespace hedgepde
