#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "shearlab/nonlinear.hpp"
#include "shearlab/poisson.hpp"

using namespace shearlab;

TEST_CASE("initial data: amplitude, mean-free in x, support") {
    auto g = ChannelGrid::make(64, 129);
    double eps = 1e-3, theta0 = 0.1;
    ChannelField om = make_initial_data(g, theta0, eps);
    CHECK(om.max_abs() == doctest::Approx(eps).epsilon(1e-12)); // eps cos(x) chi, chi max 1
    auto mean = x_average(om);
    for (int j = 0; j < g.ny; ++j) CHECK(std::abs(mean[j]) < 1e-18);
    double lo, hi;
    support_extent(om, 1e-12, &lo, &hi);
    CHECK(lo >= 2 * theta0 - 1e-12);
    CHECK(hi <= 1 - 2 * theta0 + 1e-12);
}

TEST_CASE("custom initial data is projected to zero x-mean") {
    auto g = ChannelGrid::make(32, 65);
    ChannelField om = make_initial_data(
        g, [](double x, double y) { return 1.0 + std::cos(x) * y * (1 - y); });
    auto mean = x_average(om);
    for (int j = 0; j < g.ny; ++j) CHECK(std::abs(mean[j]) < 1e-14);
}

TEST_CASE("rhs: serial reference equals the parallel kernel bitwise") {
    auto g = ChannelGrid::make(64, 129);
    auto p = make_perturbed_monotone(0.1, 0.1);
    ChannelField om = make_initial_data(g, 0.1, 1e-2);
    ChannelField a = rhs(om, p);
    ChannelField b = ref::rhs_serial(om, p);
    for (size_t i = 0; i < a.values.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("rhs conserves the vorticity integral to roundoff") {
    auto g = ChannelGrid::make(64, 129);
    auto p = make_perturbed_monotone(0.1, 0.1);
    ChannelField om = make_initial_data(g, 0.1, 1e-2);
    ChannelField r = rhs(om, p);
    // integral of the tendency: x-average of the k=0 mode, trapezoid in y
    auto mean = x_average(r);
    double total = trapz(mean, g.hy());
    CHECK(std::abs(total) < 1e-16);
}

TEST_CASE("RK4 convergence order") {
    auto g = ChannelGrid::make(32, 65);
    auto p = make_perturbed_monotone(0.1, 0.1);
    auto init = [&] {
        SimState s;
        s.t = 0.0;
        s.omega = make_initial_data(g, 0.1, 0.05); // large eps: nonlinearity active
        s.Phi.assign(g.ny, 0.0);
        s.Iomega.assign(g.ny, 0.0);
        return s;
    };
    auto advance = [&](double dt, int n) {
        SimState s = init();
        for (int i = 0; i < n; ++i) step_rk4(s, p, dt);
        return s.omega;
    };
    ChannelField fine = advance(0.0125, 64);  // reference
    ChannelField c1 = advance(0.1, 8);
    ChannelField c2 = advance(0.05, 16);
    double e1 = 0.0, e2 = 0.0;
    for (size_t i = 0; i < fine.values.size(); ++i) {
        e1 = std::max(e1, std::abs(c1.values[i] - fine.values[i]));
        e2 = std::max(e2, std::abs(c2.values[i] - fine.values[i]));
    }
    double order = std::log2(e1 / e2);
    CHECK(order > 3.5); // fourth-order one-step method
}

TEST_CASE("short nonlinear run: conservation, support, monitors") {
    SimConfig cfg;
    cfg.profile = make_perturbed_monotone(0.1, 0.1);
    cfg.grid = ChannelGrid::make(64, 129);
    cfg.eps = 1e-3;
    cfg.T_end = 5.0;
    cfg.dt = 0.025;
    cfg.out_every = 1.0;
    auto res = run(cfg);
    CHECK_FALSE(res.aborted);
    REQUIRE(res.rows.size() == 6); // t = 0..5
    double m0 = res.rows.front().mass;
    for (const auto& r : res.rows) {
        CHECK(std::abs(r.mass - m0) < 1e-12 * std::max(1.0, cfg.eps));
        CHECK(r.supmin_y >= cfg.profile.theta0 - 2 * cfg.grid.hy());
        CHECK(r.supmax_y <= 1 - cfg.profile.theta0 + 2 * cfg.grid.hy());
        CHECK(std::isfinite(r.energy));
    }
    auto mf = mean_flow_monitor(res.mean_history, cfg.profile.theta0, cfg.grid, cfg.eps);
    CHECK(mf.pass);
    CHECK(mf.wall_max <= 1e-8 * cfg.eps);
}

TEST_CASE("zero initial data stays zero") {
    SimConfig cfg;
    cfg.profile = make_couette();
    cfg.grid = ChannelGrid::make(32, 65);
    cfg.eps = 0.0;
    cfg.T_end = 1.0;
    cfg.dt = 0.05;
    cfg.out_every = 0.5;
    auto res = run(cfg);
    CHECK_FALSE(res.aborted);
    CHECK(res.final_state.omega.max_abs() == doctest::Approx(0.0));
    for (const auto& r : res.rows) {
        CHECK(r.uy_inf == doctest::Approx(0.0));
        CHECK(r.uxfluct_inf == doctest::Approx(0.0));
    }
}

TEST_CASE("T_end must be a multiple of dt") {
    SimConfig cfg;
    cfg.profile = make_couette();
    cfg.grid = ChannelGrid::make(32, 65);
    cfg.T_end = 1.0;
    cfg.dt = 0.3;
    CHECK_THROWS(run(cfg));
}
