#pragma once

#include <stdexcept>
#include <string>

namespace hedgepde {

/// Input outside the domain of a model function, grid or table.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A parameter set or configuration violates an invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A time step could not be completed (non-convergence, NaN, singular system).
class SolverError : public std::runtime_error {
public:
    SolverError(std::string equation, int step, double residual, const std::string& what)
        : std::runtime_error(equation + " step " + std::to_string(step) + ": " + what)
        , equation_(std::move(equation))
        , step_(step)
        , residual_(residual)
        , detail_(what)
    {}

    const std::string& equation() const noexcept { return equation_; }
    int step() const noexcept { return step_; }
    double residual() const noexcept { return residual_; }
    const std::string& detail() const noexcept { return detail_; }

    /// Same failure re-tagged with the step index of the enclosing march.
    SolverError at_step(int step) const { return SolverError(equation_, step, residual_, detail_); }

private:
    std::string equation_;
    int step_;
    double residual_;
    std::string detail_;
};

}  // namespace hedgepde
