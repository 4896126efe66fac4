#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hedgepde/errors.hpp"
#include "hedgepde/model.hpp"
#include "hedgepde/payoff.hpp"

#include <cmath>
#include <string>

using namespace hedgepde;

TEST_CASE("default parameters") {
    const ModelParams p;
    CHECK(p.k == 0.4);
    CHECK(p.delta == 2.0);
    CHECK(p.sigma1 == 0.153);
    CHECK(p.mu == 0.7);
    CHECK(p.sigma0 == 0.01);
    CHECK(p.T == 1.0);
    CHECK(p.rho == 0.0);
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("validation names the violated bound") {
    ModelParams p;
    p.rho = 1.5;
    try {
        p.validate();
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("[-1, 1]") != std::string::npos);
    }
    ModelParams q;
    q.sigma1 = 1.0;
    CHECK_THROWS_AS(q.validate(), ValidationError);
    ModelParams r;
    r.mu = 0.0;
    CHECK_NOTHROW(r.validate());
    r.mu = -0.1;
    CHECK_THROWS_AS(r.validate(), ValidationError);
}

TEST_CASE("f is continuous, positive, non-increasing and bounded") {
    const ModelParams p;
    CHECK(eval_f(p, 0.0) == doctest::Approx(p.mu / p.sigma0));
    CHECK(eval_f(p, p.sigma0) == doctest::Approx(p.mu / p.sigma0));
    CHECK(eval_f(p, p.sigma0 * (1 + 1e-12)) == doctest::Approx(p.mu / p.sigma0).epsilon(1e-10));
    double prev = eval_f(p, 0.0);
    for (int i = 1; i <= 2000; ++i) {
        const double x = i * 1e-3;
        const double f = eval_f(p, x);
        CHECK(f > 0.0);
        CHECK(f <= prev);
        CHECK(f <= p.mu / p.sigma0);
        prev = f;
    }
    CHECK_THROWS_AS(eval_f(p, -1e-3), DomainError);
}

TEST_CASE("g vanishes at 0 and sigma1, positive between, negative above") {
    const ModelParams p;
    CHECK(eval_g(p, 0.0) == 0.0);
    CHECK(eval_g(p, p.sigma1) == doctest::Approx(0.0).epsilon(1e-15));
    for (int i = 1; i < 100; ++i) CHECK(eval_g(p, p.sigma1 * i / 100.0) > 0.0);
    for (int i = 1; i < 100; ++i) CHECK(eval_g(p, p.sigma1 + i * 0.01) < 0.0);
}

TEST_CASE("drift variants: g1 - g = 2 (g2 - g), g1 = g at rho = 0") {
    for (double rho : {-1.0, -0.3, 0.0, 0.5, 1.0}) {
        ModelParams p;
        p.rho = rho;
        for (int i = 0; i <= 100; ++i) {
            const double x = i * 0.01;
            const double g = eval_g(p, x);
            CHECK(eval_g1(p, x) - g == doctest::Approx(2.0 * (eval_g2(p, x) - g)).epsilon(1e-13));
            if (rho == 0.0) CHECK(eval_g1(p, x) == g);
            CHECK(eval_xf(p, x) == doctest::Approx(x * eval_f(p, x)).epsilon(1e-13));
        }
    }
}

TEST_CASE("call payoff is positively homogeneous") {
    for (double lambda : {0.5, 2.0, 3.7}) {
        for (double y : {0.2, 0.9, 1.0, 1.3, 4.0}) {
            const double lhs = eval_payoff(CallPayoff{lambda * 1.0}, 0.2, lambda * y);
            const double rhs = lambda * eval_payoff(CallPayoff{1.0}, 0.2, y);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
        }
    }
}

TEST_CASE("payoff evaluation") {
    CHECK(eval_payoff(CallPayoff{1.0}, 0.1, 1.5) == doctest::Approx(0.5));
    CHECK(eval_payoff(PutPayoff{1.0}, 0.1, 0.25) == doctest::Approx(0.75));
    CHECK(eval_payoff(ConstantPayoff{3.0}, 0.7, 9.0) == 3.0);
    CHECK_THROWS_AS(eval_payoff(CallPayoff{1.0}, 0.1, 0.0), DomainError);
    CHECK_THROWS_AS(validate_payoff(CallPayoff{0.0}), ValidationError);

    // A bilinear function is reproduced exactly by the table.
    const auto fn = [](double s, double y) { return 1.0 + 2.0 * s - 0.5 * y + 3.0 * s * y; };
    const auto tab = TabulatedPayoff::sample({0.0, 0.5, 1.0}, {0.5, 1.0, 2.0, 4.0}, fn);
    CHECK_NOTHROW(validate_payoff(tab));
    for (double s : {0.0, 0.13, 0.77, 1.0})
        for (double y : {0.5, 0.8, 3.1, 4.0}) CHECK(eval_payoff(tab, s, y) == doctest::Approx(fn(s, y)).epsilon(1e-13));
    CHECK_THROWS_AS(eval_payoff(tab, 0.5, 5.0), DomainError);
    CHECK(payoff_kind(tab) == "tabulated");
    CHECK(reference_spot(PutPayoff{2.5}) == 2.5);
    CHECK(reference_spot(ConstantPayoff{1.0}) == 1.0);
}
