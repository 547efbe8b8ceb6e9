#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "shearlab/grid.hpp"
#include "shearlab/poisson.hpp"

using namespace shearlab;
using cpx = std::complex<double>;

TEST_CASE("green function closed-form k=0 and symmetry") {
    // G_0(y,z) = (1 - max) * min
    CHECK(green_function(0, 0.25, 0.5) == doctest::Approx((1 - 0.5) * 0.25).epsilon(1e-14));
    CHECK(green_function(0, 0.5, 0.25) == doctest::Approx((1 - 0.5) * 0.25).epsilon(1e-14));
    for (int k : {0, 1, 3, 12, 40}) {
        for (double y : {0.1, 0.37, 0.62, 0.9}) {
            for (double z : {0.05, 0.44, 0.81}) {
                double a = green_function(k, y, z), b = green_function(k, z, y);
                CHECK(a == doctest::Approx(b).epsilon(1e-13)); // symmetric
                CHECK(a >= 0.0);                               // positive kernel
                CHECK(green_function(-k, y, z) == doctest::Approx(a).epsilon(1e-13));
            }
            CHECK(green_function(k, y, 0.0) == doctest::Approx(0.0));
            CHECK(green_function(k, y, 1.0) == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("green function matches sinh form at moderate k") {
    // G_k(y,z) = sinh(k min) sinh(k (1-max)) / (k sinh k), evaluated naively
    int k = 4;
    double y = 0.3, z = 0.7;
    double naive = std::sinh(k * y) * std::sinh(k * (1 - z)) / (k * std::sinh(double(k)));
    CHECK(green_function(k, y, z) == doctest::Approx(naive).epsilon(1e-12));
}

TEST_CASE("green function is stable at large k (no overflow)") {
    double v = green_function(500, 0.499, 0.501);
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
    CHECK(v < 1e-2);
}

TEST_CASE("poisson mode solve: manufactured solution") {
    auto g = ChannelGrid::make(16, 513);
    for (int k : {0, 1, 5}) {
        ModeFunction f;
        f.k = k;
        f.values.resize(g.ny);
        const double pi = M_PI;
        for (int j = 0; j < g.ny; ++j)
            f.values[j] = -(pi * pi + k * k) * std::sin(pi * g.y_nodes[j]);
        ModeFunction phi = poisson_mode_solve(g, f);
        double err = 0.0;
        for (int j = 0; j < g.ny; ++j)
            err = std::max(err, std::abs(phi.values[j] - std::sin(pi * g.y_nodes[j])));
        CHECK(err < 2e-5); // second-order banded solve at h = 1/512
    }
}

TEST_CASE("poisson banded solve agrees with Green-quadrature reference") {
    auto g = ChannelGrid::make(16, 257);
    ModeFunction f;
    f.k = 2;
    f.values.resize(g.ny);
    for (int j = 0; j < g.ny; ++j) {
        double y = g.y_nodes[j];
        f.values[j] = cpx(std::exp(-40.0 * (y - 0.4) * (y - 0.4)),
                          std::sin(6.0 * y) * y * (1 - y));
    }
    ModeFunction a = poisson_mode_solve(g, f);
    ModeFunction b = ref::poisson_green_quadrature(g, f);
    double scale = 0.0, diff = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        scale = std::max(scale, std::abs(a.values[j]));
        diff = std::max(diff, std::abs(a.values[j] - b.values[j]));
    }
    CHECK(diff < 1e-4 * scale); // both second order, independent algorithms
    CHECK(std::abs(a.values[0]) == doctest::Approx(0.0));
    CHECK(std::abs(a.values[g.ny - 1]) == doctest::Approx(0.0));
}

TEST_CASE("x_average extracts the k=0 mode exactly") {
    auto g = ChannelGrid::make(32, 65);
    ChannelField f(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            f.at(i, j) = 3.0 * g.y_nodes[j] + std::cos(g.x(i)) * (1.0 + g.y_nodes[j]);
    auto avg = x_average(f);
    for (int j = 0; j < g.ny; ++j)
        CHECK(avg[j] == doctest::Approx(3.0 * g.y_nodes[j]).epsilon(1e-13));
}

TEST_CASE("mode decompose / assemble roundtrip") {
    auto g = ChannelGrid::make(32, 65);
    ChannelField f(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j)
            f.at(i, j) = std::sin(3 * g.x(i)) * g.y_nodes[j] + std::cos(g.x(i));
    auto modes = mode_decompose(f);
    ChannelField back = mode_assemble(g, modes);
    for (size_t i = 0; i < f.values.size(); ++i)
        CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-12));
    // c_0 real for real fields
    for (int j = 0; j < g.ny; ++j) CHECK(std::abs(modes[0].values[j].imag()) < 1e-14);
}

TEST_CASE("velocity from vorticity: incompressible, walls sealed") {
    auto g = ChannelGrid::make(64, 129);
    ChannelField om(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            double y = g.y_nodes[j];
            double bump = (y > 0.2 && y < 0.8)
                              ? std::exp(-1.0 / ((y - 0.2) * (0.8 - y)) * 0.01)
                              : 0.0;
            om.at(i, j) = std::cos(g.x(i)) * bump;
        }
    Velocity vel = velocity_from_vorticity(om);
    // u^y vanishes on the walls
    for (int i = 0; i < g.nx; ++i) {
        CHECK(std::abs(vel.uy.at(i, 0)) < 1e-13);
        CHECK(std::abs(vel.uy.at(i, g.ny - 1)) < 1e-13);
    }
    // <u^x> is exactly mean-free in y for this (x-mean-free) vorticity
    auto mean_ux = x_average(vel.ux);
    CHECK(std::abs(trapz(mean_ux, g.hy())) < 1e-13);
    // Delta psi = omega (interior second-order check per mode)
    auto mpsi = mode_decompose(vel.psi);
    auto mom = mode_decompose(om);
    double h = g.hy();
    double err = 0.0, scale = om.max_abs();
    for (int j = 1; j + 1 < g.ny; ++j) {
        cpx lap = (mpsi[1].values[j - 1] - 2.0 * mpsi[1].values[j] + mpsi[1].values[j + 1]) /
                      (h * h) -
                  1.0 * mpsi[1].values[j];
        err = std::max(err, std::abs(lap - mom[1].values[j]));
    }
    CHECK(err < 1e-6 * scale);
}
