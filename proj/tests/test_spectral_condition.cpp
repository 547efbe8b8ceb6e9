#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "shearlab/spectral.hpp"

using namespace shearlab;

TEST_CASE("Couette: L_k is multiplication by b, spectrum in [0,1]") {
    auto p = make_couette();
    auto g = ChannelGrid::make(16, 129);
    auto L = build_Lk(p, 2, g);
    // off-diagonal part vanishes (b'' == 0)
    double off = 0.0;
    for (int i = 0; i < g.ny; ++i)
        for (int j = 0; j < g.ny; ++j)
            if (i != j) off = std::max(off, std::abs(L.matrix(i, j)));
    CHECK(off == doctest::Approx(0.0));
    auto scan = eigen_scan(L, 1e-10);
    CHECK(scan.pass);
    CHECK(scan.flagged_imag == 0);
    CHECK(scan.flagged_range == 0);
}

TEST_CASE("perturbed profile eigen scan: no unstable modes") {
    auto p = make_perturbed_monotone(0.1, 0.1);
    auto g = ChannelGrid::make(16, 129);
    for (int k : {1, 2}) {
        auto scan = eigen_scan(build_Lk(p, k, g), 1e-8);
        CHECK(scan.pass);
    }
}

TEST_CASE("singular hat weights: exact total for linear b") {
    auto p = make_couette();
    auto g = ChannelGrid::make(16, 257);
    double y0 = 0.37, eps = 1e-3;
    auto w = singular_hat_weights(p, g.y_nodes, y0, eps);
    // sum_j w_j = int_0^1 dz / (z - y0 + i eps)  (hats sum to 1, b linear)
    cplx total(0.0, 0.0);
    for (auto& v : w) total += v;
    cplx expect = std::log(cplx(1.0 - y0, eps)) - std::log(cplx(-y0, eps));
    CHECK(std::abs(total - expect) < 1e-12);
    CHECK_THROWS(singular_hat_weights(p, g.y_nodes, y0, 0.0));
}

TEST_CASE("Couette: T operator is identically zero, kappa == 1") {
    auto p = make_couette();
    auto g = ChannelGrid::make(16, 257);
    auto T = t_operator_matrix(p, 3, 0.4, 1e-3, g);
    CHECK(T.cwiseAbs().maxCoeff() == doctest::Approx(0.0));
    auto rep = kappa_estimate(p, {1, 2}, {0.25, 0.5, 0.75}, {1e-3, 1e-4}, g);
    CHECK(rep.pass);
    CHECK(rep.kappa_min == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.max_eps_drift == doctest::Approx(0.0));
}

TEST_CASE("T apply agrees with the dense matrix") {
    auto p = make_perturbed_monotone(0.1, 0.1);
    auto g = ChannelGrid::make(16, 129);
    int k = 2;
    double y0 = 0.52, eps = 1e-2;
    auto T = t_operator_matrix(p, k, y0, eps, g);
    std::vector<cplx> f(g.ny);
    for (int j = 0; j < g.ny; ++j)
        f[j] = cplx(std::sin(3.0 * g.y_nodes[j]), std::cos(5.0 * g.y_nodes[j]));
    auto Tf = t_operator_apply(p, k, y0, eps, f, g);
    Eigen::VectorXcd fv(g.ny);
    for (int j = 0; j < g.ny; ++j) fv(j) = f[j];
    Eigen::VectorXcd mv = T * fv;
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j) err = std::max(err, std::abs(mv(j) - Tf[j]));
    CHECK(err < 1e-12 * mv.cwiseAbs().maxCoeff());
}

TEST_CASE("epsilon outside (0, 1/4] is rejected") {
    auto p = make_perturbed_monotone(0.1, 0.1);
    auto g = ChannelGrid::make(16, 65);
    CHECK_THROWS(t_operator_matrix(p, 1, 0.5, 0.0, g));
    CHECK_THROWS(t_operator_matrix(p, 1, 0.5, 0.3, g));
    CHECK_NOTHROW(t_operator_matrix(p, 1, 0.5, -0.1, g));
}

TEST_CASE("H1_k Gram factor reproduces the norm") {
    auto g = ChannelGrid::make(16, 129);
    int k = 3;
    Eigen::MatrixXd R = h1k_gram_cholesky(g, k);
    std::vector<cplx> f(g.ny);
    for (int j = 0; j < g.ny; ++j) {
        double y = g.y_nodes[j];
        f[j] = cplx(y * y * (1 - y), std::sin(2.0 * y));
    }
    Eigen::VectorXcd fv(g.ny);
    for (int j = 0; j < g.ny; ++j) fv(j) = f[j];
    double quad = (R * fv).squaredNorm(); // f^H M f with M = R^T R
    // reference: ||f||_{L2}^2 + |k|^{-2} ||f'||^2 with the same discrete rules
    double h = g.hy();
    double l2 = 0.0, d2 = 0.0;
    for (int j = 0; j < g.ny; ++j)
        l2 += ((j == 0 || j == g.ny - 1) ? 0.5 : 1.0) * std::norm(f[j]) * h;
    for (int j = 0; j + 1 < g.ny; ++j) d2 += std::norm(f[j + 1] - f[j]) / h;
    double expect = l2 + d2 / double(k * k);
    CHECK(quad == doctest::Approx(expect).epsilon(1e-12));
    // h1k_norm is the sum of the two norms (not the quadratic form)
    double n = h1k_norm(f, g, k);
    CHECK(n >= std::sqrt(l2));
    CHECK(n <= std::sqrt(l2) + std::sqrt(d2) / std::abs(double(k)) + 1e-12);
}

TEST_CASE("perturbed profile: kappa positive and eps-stable") {
    auto p = make_perturbed_monotone(0.1, 0.1);
    auto g = ChannelGrid::make(16, 129);
    auto rep = kappa_estimate(p, {1, 2}, default_y0_grid(8), {1e-3, 1e-4}, g);
    CHECK(rep.pass);
    CHECK(rep.kappa_min > 0.0);
    CHECK(rep.resolved);
    CHECK(rep.max_eps_drift <= 0.2);
}

TEST_CASE("T norm decays with k") {
    auto p = make_perturbed_monotone(0.1, 0.1);
    auto g = ChannelGrid::make(16, 129);
    double t1 = t_operator_norm(p, 1, 0.5, 1e-3, g);
    double t4 = t_operator_norm(p, 4, 0.5, 1e-3, g);
    double t16 = t_operator_norm(p, 16, 0.5, 1e-3, g);
    CHECK(t1 > 0.0);
    CHECK(t4 < t1);
    CHECK(t16 < t4);
}
