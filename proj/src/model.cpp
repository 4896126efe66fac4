#include "hedgepde/model.hpp"

#include "hedgepde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hedgepde {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw ValidationError(what);
}

void require_nonnegative(double x) {
    if (!(x >= 0.0)) {
        throw DomainError("volatility argument must be >= 0, got " + std::to_string(x));
    }
}

}  // namespace

void ModelParams::validate() const {
    require(std::isfinite(k) && k > 0.0, "k must be > 0");
    require(std::isfinite(rho) && rho >= -1.0 && rho <= 1.0, "rho must lie in [-1, 1]");
    require(std::isfinite(delta) && delta > 0.0, "delta must be > 0");
    require(std::isfinite(sigma1) && sigma1 > 0.0 && sigma1 < 1.0, "sigma1 must lie in (0, 1)");
    require(std::isfinite(mu) && mu >= 0.0, "mu must be >= 0");
    require(std::isfinite(sigma0) && sigma0 > 0.0, "sigma0 must be > 0");
    require(std::isfinite(T) && T > 0.0, "T must be > 0");
}

double eval_f(const ModelParams& p, double x) {
    require_nonnegative(x);
    return x <= p.sigma0 ? p.mu / p.sigma0 : p.mu / x;
}

double eval_g(const ModelParams& p, double x) {
    require_nonnegative(x);
    return -p.delta * x * (x - p.sigma1);
}

double eval_xf(const ModelParams& p, double x) {
    require_nonnegative(x);
    return p.mu * std::min(x / p.sigma0, 1.0);
}

double eval_g1(const ModelParams& p, double x) {
    return eval_g(p, x) - 2.0 * p.rho * p.k * eval_xf(p, x);
}

double eval_g2(const ModelParams& p, double x) {
    return eval_g(p, x) - p.rho * p.k * eval_xf(p, x);
}

}  // namespace hedgepde
