#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "shearlab/profiles.hpp"

using namespace shearlab;

TEST_CASE("couette profile") {
    auto p = make_couette();
    for (double y : {0.0, 0.3, 0.77, 1.0}) {
        CHECK(p.b(y) == doctest::Approx(y).epsilon(1e-15));
        CHECK(p.b1(y) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(p.b2(y) == doctest::Approx(0.0));
        CHECK(p.binv(p.b(y)) == doctest::Approx(y).epsilon(1e-10));
    }
}

TEST_CASE("perturbed monotone profile: derivative bounds and support") {
    double theta0 = 0.1, amp = 0.1;
    auto p = make_perturbed_monotone(amp, theta0);
    CHECK(p.b(0.0) == doctest::Approx(0.0));
    double min_b1 = 1e300, max_b1 = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        double y = i / 1000.0;
        double b1 = p.b1(y);
        min_b1 = std::min(min_b1, b1);
        max_b1 = std::max(max_b1, b1);
        // b'' supported in [2 theta0, 1 - 2 theta0]
        if (y < 2 * theta0 - 1e-12 || y > 1 - 2 * theta0 + 1e-12)
            CHECK(p.b2(y) == doctest::Approx(0.0));
        // consistency of b' with finite differences of b
        double h = 1e-6;
        if (y > h && y < 1 - h) {
            double fd = (p.b(y + h) - p.b(y - h)) / (2 * h);
            CHECK(fd == doctest::Approx(b1).epsilon(1e-6));
        }
    }
    CHECK(min_b1 == doctest::Approx(1.0).epsilon(1e-12)); // b' = 1 + amp * chi >= 1
    CHECK(max_b1 <= 1.0 + amp + 1e-12);
    CHECK(max_b1 > 1.0 + 0.9 * amp); // plateau reaches the full amplitude
    // strict monotonicity via the inverse
    for (double v : {0.05, 0.3, 0.52, 0.9}) CHECK(p.b(p.binv(v)) == doctest::Approx(v).epsilon(1e-8));
}

TEST_CASE("gevrey cutoff: plateau, support, C1 seams") {
    auto c = gevrey_cutoff(0.2, 0.3, 0.7, 0.8, 0.5);
    CHECK(c(0.1) == 0.0);
    CHECK(c(0.85) == 0.0);
    CHECK(c(0.5) == 1.0);
    CHECK(c(0.3) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(c(0.2) == doctest::Approx(0.0));
    for (int i = 0; i <= 200; ++i) {
        double x = i / 200.0;
        double v = c(x);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        double h = 1e-7;
        double fd = (c(x + h) - c(x - h)) / (2 * h);
        CHECK(std::abs(fd - c.deriv(x)) < 1e-5 * (1.0 + std::abs(c.deriv(x))));
    }
    // monotone on the rise
    for (double x = 0.21; x < 0.295; x += 0.005) CHECK(c(x + 0.005) >= c(x));
}

TEST_CASE("gevrey glue partition identity") {
    for (double u : {0.1, 0.35, 0.5, 0.81}) {
        CHECK(gevrey_glue(u, 0.5) + gevrey_glue(1.0 - u, 0.5) == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(gevrey_glue(u, 0.75) + gevrey_glue(1.0 - u, 0.75) == doctest::Approx(1.0).epsilon(1e-13));
    }
    CHECK(gevrey_glue(0.5, 0.5) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("gevrey norm estimate: lambda=0 reproduces the L2 norm") {
    int n = 513;
    std::vector<double> f(n);
    double l2 = 0.0, h = 1.0 / (n - 1);
    for (int i = 0; i < n; ++i) {
        double y = i * h;
        f[i] = (y > 0.2 && y < 0.8) ? std::sin(M_PI * (y - 0.2) / 0.6) : 0.0;
    }
    for (int i = 0; i + 1 < n; ++i) l2 += 0.5 * h * (f[i] * f[i] + f[i + 1] * f[i + 1]);
    l2 = std::sqrt(l2);
    auto r = gevrey_norm_estimate(f, 0.0, 0.5);
    CHECK(r.value == doctest::Approx(l2).epsilon(1e-3));
    CHECK(r.resolved);
}

TEST_CASE("gevrey norm estimate flags unresolved weighted tails") {
    // a kinked function has slow Fourier decay; a large Gevrey weight cannot
    // be summed on this grid and must be flagged
    int n = 257;
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) {
        double y = i / double(n - 1);
        f[i] = std::max(0.0, 0.25 - std::abs(y - 0.5));
    }
    auto r = gevrey_norm_estimate(f, 8.0, 0.5);
    CHECK_FALSE(r.resolved);
    CHECK(r.tail_fraction > 1e-8);
}

TEST_CASE("assumption verification") {
    auto rep_c = verify_assumption_A(make_couette());
    CHECK(rep_c.pass);
    CHECK(rep_c.min_b1 == doctest::Approx(1.0));
    CHECK(rep_c.gevrey_b2 == doctest::Approx(0.0));

    auto rep_p = verify_assumption_A(make_perturbed_monotone(0.1, 0.1));
    CHECK(rep_p.pass);
    CHECK(rep_p.deriv_bounds);
    CHECK(rep_p.support_ok);
    CHECK(rep_p.size_ok);
    CHECK(rep_p.max_b1 == doctest::Approx(1.1).epsilon(1e-6));

    // a huge perturbation violates the smallness condition
    auto rep_big = verify_assumption_A(make_perturbed_monotone(8.0, 0.1));
    CHECK_FALSE(rep_big.pass);
}
