#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hedgepde/errors.hpp"
#include "hedgepde/field_io.hpp"
#include "hedgepde/grid.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace hedgepde;

namespace {

Grid2D small_grid() { return Grid2D{Grid1D{1.0, 11}, -1.0, 2.0, 13}; }

Field2D sample(const Grid2D& g, double (*fn)(double, double)) {
    Field2D f(g, 0.0);
    for (int i = 0; i < g.n_x(); ++i)
        for (int j = 0; j < g.n_z; ++j) f(i, j) = fn(g.x(i), g.z(j));
    return f;
}

}  // namespace

TEST_CASE("grid nodes") {
    const Grid1D g{0.8, 5};
    CHECK(g.x(0) == 0.0);
    CHECK(g.x(4) == 0.8);
    CHECK(g.h() == doctest::Approx(0.2));
    CHECK_THROWS_AS((Grid1D{0.1, 11}.validate(0.153)), ValidationError);
    CHECK_THROWS_AS((Grid1D{1.0, 2}.validate(0.153)), ValidationError);
    const Grid2D c = Grid2D::centered(Grid1D{}, 2.0, 1.5, 31);
    CHECK(c.z_min == doctest::Approx(std::log(2.0) - 1.5));
    CHECK(c.z(30) == doctest::Approx(std::log(2.0) + 1.5));
    CHECK(c.index(2, 3) == 2u * 31 + 3);
}

TEST_CASE("stencils are exact on low-degree polynomials") {
    Field1D lin(Grid1D{1.0, 11}, 0.0);
    Field1D quad(Grid1D{1.0, 11}, 0.0);
    for (int i = 0; i < 11; ++i) {
        lin[i] = 2.0 * lin.grid.x(i);
        quad[i] = lin.grid.x(i) * lin.grid.x(i);
    }
    for (int i = 1; i < 10; ++i) {
        CHECK(d_dx(lin, i) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(d_dx(lin, i, Difference::Forward) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(d_dx(lin, i, Difference::Backward) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(d2_dx2(quad, i) == doctest::Approx(2.0).epsilon(1e-10));
    }
    CHECK_THROWS_AS(d_dx(lin, 0), DomainError);
    CHECK_THROWS_AS(d2_dx2(lin, 10), DomainError);
    CHECK_NOTHROW(d_dx(lin, 0, Difference::Forward));

    const Grid2D g = small_grid();
    const Field2D xz = sample(g, [](double x, double z) { return x * z; });
    const Field2D zz = sample(g, [](double x, double z) { return z * z + x; });
    for (int i = 1; i < g.n_x() - 1; ++i) {
        for (int j = 1; j < g.n_z - 1; ++j) {
            CHECK(d2_dxdz(xz, i, j) == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(d_dz(xz, i, j) == doctest::Approx(g.x(i)).epsilon(1e-12));
            CHECK(d_dx(xz, i, j) == doctest::Approx(g.z(j)).epsilon(1e-12));
            CHECK(d2_dz2(zz, i, j) == doctest::Approx(2.0).epsilon(1e-10));
            CHECK(d2_dx2(zz, i, j) == doctest::Approx(0.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("upwind picks the side the velocity comes from") {
    Field1D f(Grid1D{1.0, 5}, 0.0);
    for (int i = 0; i < 5; ++i) f[i] = i * i;
    CHECK(d_dx_upwind(f, 2, 1.0) == doctest::Approx((9.0 - 4.0) / 0.25));
    CHECK(d_dx_upwind(f, 2, -1.0) == doctest::Approx((4.0 - 1.0) / 0.25));
}

TEST_CASE("interpolation") {
    Field1D u(Grid1D{1.0, 11}, 0.0, -1.0);
    CHECK(interpolate(u, 0.37) == -1.0);
    CHECK(std::exp(interpolate(u, 0.37)) == doctest::Approx(std::exp(-1.0)));
    CHECK_THROWS_AS(interpolate(u, 1.01), DomainError);

    const Grid2D g = small_grid();
    const auto bilinear = [](double x, double z) { return 1.0 + 2.0 * x - z + 0.5 * x * z; };
    const Field2D f = sample(g, bilinear);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ux(0.0, 1.0), uz(-1.0, 2.0);
    for (int n = 0; n < 200; ++n) {
        const double x = ux(rng), z = uz(rng);
        CHECK(interpolate(f, x, z) == doctest::Approx(bilinear(x, z)).epsilon(1e-12));
    }
    CHECK(interpolate(f, 1.0, 2.0) == doctest::Approx(bilinear(1.0, 2.0)));
    CHECK_THROWS_AS(interpolate(f, 0.5, 2.5), DomainError);
}

TEST_CASE("field CSV round trip is exact") {
    const Grid2D g = small_grid();
    Field2D f = sample(g, [](double x, double z) { return std::sin(x) * std::exp(z) / 3.0; });
    f.t = 0.7;
    std::stringstream ss;
    write_field_csv(ss, f, "00ff");
    const std::string text = ss.str();
    CHECK(text.rfind("# hedgepde config_hash=00ff\n", 0) == 0);
    const Field2D back = read_field2d_csv(ss);
    CHECK(back.grid == g);
    CHECK(back.t == 0.7);
    CHECK(back.values == f.values);

    Field1D u(Grid1D{0.9, 7}, 0.25);
    for (int i = 0; i < 7; ++i) u[i] = -1.0 / (i + 3.0);
    std::stringstream s1;
    write_field_csv(s1, u, "ab");
    const Field1D u_back = read_field1d_csv(s1);
    CHECK(u_back.values == u.values);
    CHECK(u_back.grid == u.grid);
}

TEST_CASE("number format") {
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(1.0) == "1");
    CHECK(parse_number(format_number(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK_THROWS_AS(parse_number("1.2x"), DomainError);
}
