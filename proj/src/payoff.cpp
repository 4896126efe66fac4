#include "hedgepde/payoff.hpp"

#include "hedgepde/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hedgepde {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool strictly_increasing(const std::vector<double>& v) {
    return std::adjacent_find(v.begin(), v.end(), std::greater_equal<>()) == v.end();
}

// Index of the cell [v[i], v[i+1]] containing q, with its local coordinate.
std::pair<std::size_t, double> locate(const std::vector<double>& v, double q) {
    auto it = std::upper_bound(v.begin(), v.end(), q);
    std::size_t i = it == v.begin() ? 0 : static_cast<std::size_t>(it - v.begin()) - 1;
    i = std::min(i, v.size() - 2);
    return {i, (q - v[i]) / (v[i + 1] - v[i])};
}

double lookup(const TabulatedPayoff& t, double x, double y) {
    if (x < t.sigma.front() || x > t.sigma.back() || y < t.price.front() || y > t.price.back()) {
        throw DomainError("tabulated payoff queried outside its table");
    }
    const auto [i, s] = locate(t.sigma, x);
    const auto [j, r] = locate(t.price, y);
    const std::size_t n = t.price.size();
    const double v00 = t.values[i * n + j];
    const double v01 = t.values[i * n + j + 1];
    const double v10 = t.values[(i + 1) * n + j];
    const double v11 = t.values[(i + 1) * n + j + 1];
    return (1 - s) * ((1 - r) * v00 + r * v01) + s * ((1 - r) * v10 + r * v11);
}

}  // namespace

TabulatedPayoff TabulatedPayoff::sample(std::vector<double> sigma, std::vector<double> price,
                                        const std::function<double(double, double)>& fn) {
    TabulatedPayoff t{std::move(sigma), std::move(price), {}};
    t.values.reserve(t.sigma.size() * t.price.size());
    for (double s : t.sigma) {
        for (double p : t.price) t.values.push_back(fn(s, p));
    }
    return t;
}

void validate_payoff(const Payoff& payoff) {
    std::visit(overloaded{
                   [](const CallPayoff& c) {
                       if (!(c.strike > 0.0 && std::isfinite(c.strike)))
                           throw ValidationError("call strike must be > 0");
                   },
                   [](const PutPayoff& p) {
                       if (!(p.strike > 0.0 && std::isfinite(p.strike)))
                           throw ValidationError("put strike must be > 0");
                   },
                   [](const ConstantPayoff& c) {
                       if (!std::isfinite(c.value)) throw ValidationError("constant payoff must be finite");
                   },
                   [](const TabulatedPayoff& t) {
                       if (t.sigma.size() < 2 || t.price.size() < 2)
                           throw ValidationError("tabulated payoff needs at least 2x2 samples");
                       if (t.values.size() != t.sigma.size() * t.price.size())
                           throw ValidationError("tabulated payoff value count does not match its axes");
                       if (!strictly_increasing(t.sigma) || !strictly_increasing(t.price))
                           throw ValidationError("tabulated payoff axes must be strictly increasing");
                       if (!(t.price.front() > 0.0))
                           throw ValidationError("tabulated payoff prices must be > 0");
                       for (double v : t.values)
                           if (!std::isfinite(v)) throw ValidationError("tabulated payoff values must be finite");
                   },
               },
               payoff);
}

double eval_payoff(const Payoff& payoff, double x, double y) {
    if (!(y > 0.0)) throw DomainError("payoff price argument must be > 0");
    return std::visit(overloaded{
                          [&](const CallPayoff& c) { return std::max(y - c.strike, 0.0); },
                          [&](const PutPayoff& p) { return std::max(p.strike - y, 0.0); },
                          [](const ConstantPayoff& c) { return c.value; },
                          [&](const TabulatedPayoff& t) { return lookup(t, x, y); },
                      },
                      payoff);
}

std::string payoff_kind(const Payoff& payoff) {
    return std::visit(overloaded{
                          [](const CallPayoff&) { return std::string("call"); },
                          [](const PutPayoff&) { return std::string("put"); },
                          [](const ConstantPayoff&) { return std::string("constant"); },
                          [](const TabulatedPayoff&) { return std::string("tabulated"); },
                      },
                      payoff);
}

double reference_spot(const Payoff& payoff) {
    if (const auto* c = std::get_if<CallPayoff>(&payoff)) return c->strike;
    if (const auto* p = std::get_if<PutPayoff>(&payoff)) return p->strike;
    return 1.0;
}

}  // namespace hedgepde
