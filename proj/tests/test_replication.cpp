#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hedgepde/errors.hpp"
#include "hedgepde/replication.hpp"

#include <cmath>
#include <sstream>

using namespace hedgepde;

namespace {

Grid2D grid(int nx, int nz) { return Grid2D::centered(Grid1D{1.0, nx}, 1.0, 4.0, nz); }

}  // namespace

TEST_CASE("a0 is the exponential of u1") {
    const Field1D zero(Grid1D{}, 1.0, 0.0);
    for (double v : extract_a0(zero).values) CHECK(v == 1.0);
    const Field1D minus_one(Grid1D{}, 1.0, -1.0);
    for (double v : extract_a0(minus_one).values) CHECK(v == std::exp(-1.0));
}

TEST_CASE("theta of alpha + beta e^z is beta up to the stencil error") {
    const Grid2D g = grid(21, 81);
    const double alpha = 0.3, beta = 0.85;
    Field2D u(g, 1.0);
    for (int i = 0; i < g.n_x(); ++i)
        for (int j = 0; j < g.n_z; ++j) u(i, j) = alpha + beta * g.y(j);
    for (double rho : {-0.7, 0.0, 1.0}) {
        ModelParams p;
        p.rho = rho;
        const Field2D theta = compute_theta0(u, p);
        for (int i = 0; i < g.n_x(); ++i)
            for (int j = 1; j < g.n_z - 1; ++j) CHECK(theta(i, j) == doctest::Approx(beta).epsilon(1e-3));
    }
}

TEST_CASE("theta extraction is linear") {
    const Grid2D g = grid(21, 21);
    Field2D u(g, 1.0), v(g, 1.0), w(g, 1.0);
    for (int i = 0; i < g.n_x(); ++i) {
        for (int j = 0; j < g.n_z; ++j) {
            u(i, j) = std::sin(g.x(i) * 3.0 + g.z(j));
            v(i, j) = g.x(i) * g.x(i) * std::exp(-g.z(j));
            w(i, j) = 2.0 * u(i, j) - 0.5 * v(i, j);
        }
    }
    ModelParams p;
    p.rho = -0.4;
    const Field2D tu = compute_theta0(u, p), tv = compute_theta0(v, p), tw = compute_theta0(w, p);
    for (std::size_t r = 0; r < g.size(); ++r)
        CHECK(tw.values[r] == doctest::Approx(2.0 * tu.values[r] - 0.5 * tv.values[r]).epsilon(1e-12));
}

TEST_CASE("constant payoff: V0* = C, eps* = 0, theta = 0") {
    const ModelParams p;
    const auto res = march_system(p, grid(41, 41), ConstantPayoff{1.25}, 50);
    const auto rep = replication_summary(res.final_state(), p, p.sigma1, 1.0);
    CHECK(rep.v0_star == 1.25);
    CHECK(rep.eps_star == 0.0);
    CHECK_FALSE(rep.clamp_flagged);
    for (double v : rep.theta0.values) CHECK(v == 0.0);
    CHECK(rep.value_function(1.25) == 0.0);
}

TEST_CASE("eps* vanishes at rho = +-1 and is positive at rho = 0") {
    double eps0 = 0.0;
    for (double rho : {-1.0, 0.0, 1.0}) {
        ModelParams p;
        p.rho = rho;
        const auto res = march_system(p, grid(51, 51), CallPayoff{1.0}, 200);
        const auto rep = replication_summary(res.final_state(), p, p.sigma1, 1.0);
        if (rho == 0.0) {
            eps0 = rep.eps_star;
            CHECK(eps0 > 0.0);
            CHECK_FALSE(rep.clamp_flagged);
        } else {
            CHECK(rep.eps_star == 0.0);
        }
    }
    CHECK(eps0 > 0.0);
}

TEST_CASE("clamp is recorded when interpolated u3 is negative") {
    const Grid2D g = grid(11, 11);
    SystemState s = initial_state(g, CallPayoff{1.0});
    for (double& v : s.u3.values) v = -2e-8;
    const auto rep = replication_summary(s, ModelParams{}, 0.153, 1.0);
    CHECK(rep.eps_star == 0.0);
    CHECK(rep.clamp_magnitude == doctest::Approx(2e-8));
    CHECK(rep.clamp_flagged);
    for (double& v : s.u3.values) v = -1e-12;
    CHECK_FALSE(replication_summary(s, ModelParams{}, 0.153, 1.0).clamp_flagged);
    CHECK_THROWS_AS(replication_summary(s, ModelParams{}, 0.153, 1000.0), DomainError);
    CHECK_THROWS_AS(replication_summary(s, ModelParams{}, 1.5, 1.0), DomainError);
}

TEST_CASE("deep in and out of the money call deltas") {
    const ModelParams p;
    const Grid2D g = grid(51, 81);
    const auto res = march_system(p, g, CallPayoff{1.0}, 200);
    const Field2D theta = compute_theta0(res.final_state().u2, p);
    const int i = 8;  // σ = 0.16
    CHECK(interpolate(theta, g.x(i), 2.5) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(interpolate(theta, g.x(i), -2.5)) < 0.05);
}

TEST_CASE("a0 does not depend on the log-price grid") {
    const ModelParams p;
    const auto a = march_system(p, Grid2D::centered(Grid1D{}, 1.0, 4.0, 21), CallPayoff{1.0}, 50);
    const auto b = march_system(p, Grid2D::centered(Grid1D{}, 2.0, 2.0, 41), CallPayoff{2.0}, 50);
    CHECK(a.final_state().u1.values == b.final_state().u1.values);
    CHECK(a.final_state().u1.values == solve_u1(p, Grid1D{}, 50).fields.back().values);
}

TEST_CASE("rho sweep: zero drift gives a = 1") {
    ModelParams p;
    p.mu = 0.0;
    const auto sweep = rho_sweep(p, kDefaultSweepRhos, Grid1D{}, 50);
    REQUIRE(sweep.all_succeeded());
    for (const auto& col : sweep.a0)
        for (double v : col->values) CHECK(v == 1.0);
}

TEST_CASE("rho sweep: bounds and asymmetry in rho") {
    const ModelParams p;
    const auto sweep = rho_sweep(p, kDefaultSweepRhos, Grid1D{}, 200, 2);
    REQUIRE(sweep.all_succeeded());
    for (std::size_t k = 0; k < sweep.rhos.size(); ++k) {
        for (int i = 0; i < sweep.grid.n_x; ++i) {
            CHECK(std::isfinite((*sweep.u1[k])[i]));
            CHECK((*sweep.a0[k])[i] <= 1.0 + 1e-10);
        }
    }
    auto gap = [&](std::size_t a, std::size_t b) {
        return max_abs_diff(sweep.a0[a]->values, sweep.a0[b]->values);
    };
    CHECK(gap(1, 3) > 1e-6);
    // exp(u₁) underflows to 0 for both ρ = ±1; their logarithms still differ.
    CHECK(max_abs_diff(sweep.u1[0]->values, sweep.u1[4]->values) > 1.0);
}

TEST_CASE("rho sweep records failures and continues") {
    const ModelParams p;
    const auto sweep = rho_sweep(p, {0.0, 1.5, -0.5}, Grid1D{}, 50);
    CHECK_FALSE(sweep.all_succeeded());
    CHECK(sweep.errors[0].empty());
    CHECK_FALSE(sweep.errors[1].empty());
    CHECK(sweep.errors[2].empty());
    std::ostringstream os;
    write_sweep_csv(os, sweep, "0");
    CHECK(os.str().find("nan") != std::string::npos);
}

TEST_CASE("sweep CSV does not depend on the thread count") {
    const ModelParams p;
    std::ostringstream one, four;
    write_sweep_csv(one, rho_sweep(p, kDefaultSweepRhos, Grid1D{}, 100, 1), "h");
    write_sweep_csv(four, rho_sweep(p, kDefaultSweepRhos, Grid1D{}, 100, 4), "h");
    CHECK(one.str() == four.str());
}
