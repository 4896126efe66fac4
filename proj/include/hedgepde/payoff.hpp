#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace hedgepde {

struct CallPayoff {
    double strike = 1.0;
};

struct PutPayoff {
    double strike = 1.0;
};

struct ConstantPayoff {
    double value = 0.0;
};

/// Samples F(σ, P) on a tensor grid, looked up bilinearly. Queries outside
/// [sigma.front(), sigma.back()] × [price.front(), price.back()] are rejected.
struct TabulatedPayoff {
    std::vector<double> sigma;   ///< strictly increasing
    std::vector<double> price;   ///< strictly increasing, > 0
    std::vector<double> values;  ///< row-major, sigma.size() × price.size()

    /// Samples `fn(sigma, price)` at every node.
    static TabulatedPayoff sample(std::vector<double> sigma, std::vector<double> price,
                                  const std::function<double(double, double)>& fn);
};

using Payoff = std::variant<CallPayoff, PutPayoff, ConstantPayoff, TabulatedPayoff>;

/// Throws ValidationError when a strike is non-positive or a table is malformed.
void validate_payoff(const Payoff& payoff);

/// Terminal claim at volatility x and price y (y > 0).
double eval_payoff(const Payoff& payoff, double x, double y);

/// Short tag used in config echoes and reports: call, put, constant, tabulated.
std::string payoff_kind(const Payoff& payoff);

/// Strike for calls and puts, 1 otherwise; used as the default evaluation spot.
double reference_spot(const Payoff& payoff);

}  // namespace hedgepde
