#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "shearlab/weights.hpp"

using namespace shearlab;

TEST_CASE("parameter scales and validation") {
    auto ph = WeightParams::physical();
    CHECK(ph.delta == doctest::Approx(0.01));
    CHECK(ph.threshold() == doctest::Approx(1e20).epsilon(1e-10));
    auto ts = WeightParams::test_scale();
    CHECK(ts.delta == doctest::Approx(0.5));
    CHECK(ts.threshold() == doctest::Approx(1024.0).epsilon(1e-12));
    ph.validate();
    ts.validate();
    WeightParams bad = ph;
    bad.delta_prime = bad.delta; // need delta' < delta
    CHECK_THROWS(bad.validate());
}

TEST_CASE("resonant structure oracle at eta=2000, test scale") {
    WeightEvaluator W(WeightParams::test_scale()); // delta = 0.5, threshold 1024
    double eta = 2000.0;
    // k0 = floor(sqrt(delta^3 |eta|)) = floor(sqrt(0.125 * 2000)) = 15
    CHECK(W.k0_of(eta) == 15);
    auto st = W.structure_copy(eta);
    CHECK(st.k0 == 15);
    CHECK(st.t.size() == 16);
    CHECK(st.t[0] == doctest::Approx(2.0 * eta));               // t_0 = 2 eta
    CHECK(st.t[1] == doctest::Approx(0.5 * (eta / 2 + eta)));   // t_1 = 1500
    for (size_t l = 0; l + 1 < st.t.size(); ++l) CHECK(st.t[l] > st.t[l + 1]);
    CHECK(W.t_k0(eta) == doctest::Approx(st.t[15]));
    // below threshold: no structure
    CHECK(W.k0_of(1000.0) == 0);
}

TEST_CASE("w is trivial below threshold and symmetric in eta") {
    WeightEvaluator W(WeightParams::test_scale());
    CHECK(W.w(WKind::NR, 0, 3.0, 1000.0) == doctest::Approx(1.0));
    CHECK(W.w(WKind::NR, 0, 777.0, -900.0) == doctest::Approx(1.0));
    for (double t : {10.0, 300.0, 2500.0})
        CHECK(W.log_w(WKind::NR, 0, t, 2000.0) ==
              doctest::Approx(W.log_w(WKind::NR, 0, t, -2000.0)).epsilon(1e-13));
}

TEST_CASE("w sandwich at the last resonant time") {
    WeightEvaluator W(WeightParams::test_scale());
    double delta = W.params().delta;
    for (double eta : {2000.0, 1e4, 3e5}) {
        double logX = -std::pow(delta, 1.5) * std::log(1.0 / delta) * std::sqrt(eta);
        double lw = W.log_w(WKind::NR, 0, W.t_k0(eta), eta);
        CHECK(lw >= 4.0 * logX - 1e-9);
        CHECK(lw <= 0.25 * logX + 1e-9);
    }
}

TEST_CASE("w_NR is continuous across interval seams and in [0,1]") {
    WeightEvaluator W(WeightParams::test_scale());
    double eta = 2000.0;
    auto st = W.structure_copy(eta);
    for (size_t l = 1; l < st.t.size(); ++l) {
        double tl = st.t[l];
        double below = W.log_w(WKind::NR, 0, tl * (1 - 1e-9), eta);
        double above = W.log_w(WKind::NR, 0, tl * (1 + 1e-9), eta);
        CHECK(std::abs(below - above) < 1e-5);
    }
    for (double t = 0.0; t <= 2.2 * eta; t += eta / 37.0) {
        double w = W.w(WKind::NR, 0, t, eta);
        CHECK(w <= 1.0 + 1e-12);
        CHECK(w >= 0.0);
    }
    // w == 1 for t >= 2 eta
    CHECK(W.w(WKind::NR, 0, 2.0 * eta, eta) == doctest::Approx(1.0));
    CHECK(W.w(WKind::NR, 0, 3.0 * eta, eta) == doctest::Approx(1.0));
}

TEST_CASE("resonant w_R <= w_k <= w_NR pointwise") {
    WeightEvaluator W(WeightParams::test_scale());
    double eta = 50000.0;
    for (int k = 1; k <= W.k0_of(eta); k += 3) {
        double tres = eta / k;
        for (double t : {tres, tres * (1 + 1e-4), tres * (1 - 1e-4)}) {
            double wr = W.log_w(WKind::R, k, t, eta);
            double wk = W.log_w(WKind::K, k, t, eta);
            double wnr = W.log_w(WKind::NR, k, t, eta);
            CHECK(wr <= wk + 1e-12);
            CHECK(wk <= wnr + 1e-12);
        }
    }
}

TEST_CASE("resonant interval detection") {
    WeightEvaluator W(WeightParams::test_scale());
    double eta = 50000.0;
    int k0 = W.k0_of(eta);
    REQUIRE(k0 >= 2);
    // t close to eta/k for 1 <= k <= k0 is resonant for positive eta
    CHECK(W.in_resonant_interval(2, eta / 2, eta));
    CHECK_FALSE(W.in_resonant_interval(2, eta / 2, -eta)); // sign-adjusted
    CHECK(W.in_resonant_interval(-2, eta / 2, -eta));
    CHECK_FALSE(W.in_resonant_interval(k0 + 1, eta / (k0 + 1), eta));
}

TEST_CASE("mollified b equals 1 in deep constant regions") {
    WeightEvaluator W(WeightParams::test_scale());
    // |xi| far below threshold: w == 1 in the whole window, so b == 1 exactly
    for (double xi : {0.0, 100.0, -400.0})
        for (double t : {0.0, 5.0, 1234.0})
            CHECK(W.b(WKind::NR, 0, t, xi) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(W.bump_d0() > 0.0);
}

TEST_CASE("bump function shape") {
    CHECK(WeightEvaluator::bump_phi(0.0) == doctest::Approx(1.0));
    CHECK(WeightEvaluator::bump_phi(1.24) == doctest::Approx(1.0));
    CHECK(WeightEvaluator::bump_phi(1.61) == doctest::Approx(0.0));
    CHECK(WeightEvaluator::bump_phi(-1.4) == doctest::Approx(WeightEvaluator::bump_phi(1.4)));
    double v = WeightEvaluator::bump_phi(1.45);
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("lambda(t) oracle values and monotonicity") {
    WeightEvaluator W(WeightParams::physical()); // delta0 = 0.1, sigma0 = 0.01
    CHECK(W.lambda(0.0) == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(W.lambda(1e6) == doctest::Approx(0.149864).epsilon(1e-5));
    double prev = W.lambda(0.0);
    for (double t : {0.5, 1.0, 10.0, 100.0, 1e4}) {
        double l = W.lambda(t);
        CHECK(l < prev);
        CHECK(l > 1.4 * W.params().delta0); // lambda stays >= 1.4 delta0
        prev = l;
    }
}

TEST_CASE("A at the origin matches the closed form") {
    for (auto wp : {WeightParams::physical(), WeightParams::test_scale()}) {
        WeightEvaluator W(wp);
        double expect = std::exp(1.5 * wp.delta0) * (std::exp(std::sqrt(wp.delta)) + 1.0);
        CHECK(W.A(WKind::K, 0, 0.0, 0.0) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("A decreases in t below threshold (driven by lambda)") {
    WeightEvaluator W(WeightParams::physical());
    for (double xi : {0.0, 3.0, 250.0}) {
        double prev = 1e300;
        for (double t : {0.0, 1.0, 5.0, 25.0, 125.0}) {
            double a = W.A(WKind::NR, 0, t, xi);
            CHECK(a < prev);
            prev = a;
        }
    }
}

TEST_CASE("A lower bound e^{1.1 delta0 <k,xi>^{1/2}}") {
    WeightEvaluator W(WeightParams::physical());
    for (int k : {0, 1, 4})
        for (double xi : {0.0, 10.0, 4000.0})
            for (double t : {0.0, 2.0, 40.0}) {
                double half = std::sqrt(std::sqrt(1.0 + double(k) * k + xi * xi));
                CHECK(W.A(WKind::K, k, t, xi) >= std::exp(1.1 * W.params().delta0 * half));
            }
}

TEST_CASE("mu variants: zeros, floors, resonant enhancement") {
    WeightEvaluator W(WeightParams::test_scale());
    double d2 = W.params().delta * W.params().delta;
    // below threshold or past 2|xi|: mu# = 0
    CHECK(W.mu_sharp(3.0, 1000.0) == doctest::Approx(0.0));
    CHECK(W.mu_sharp(5000.0, 2000.0) == doctest::Approx(0.0));
    // before the last resonant time: mu# = delta^2
    double eta = 2000.0;
    CHECK(W.mu_sharp(0.5 * W.t_k0(eta), eta) == doctest::Approx(d2).epsilon(1e-12));
    // at exact resonance t = eta/k the denominator is 1
    CHECK(W.mu_sharp(eta / 3.0, eta) == doctest::Approx(d2).epsilon(1e-12));
    // mu_k and mu_R are positive and dominated by their two summands
    double mk = W.mu_k(2, 100.0, 5000.0);
    double mr = W.mu_R(100.0, 5000.0);
    CHECK(mk > 0.0);
    CHECK(mr > 0.0);
}

TEST_CASE("randomized comparison audit is finite and stable") {
    WeightEvaluator W(WeightParams::test_scale());
    auto rep = audit_comparison_lemmas(W, 2000, 42);
    CHECK(rep.samples == 2000);
    CHECK(rep.all_finite);
    CHECK(rep.stable);
    CHECK(rep.max_w_ratio > 0.0);
    CHECK(rep.smooth_region_deriv_err < 1e-6);
    CHECK(rep.hist_w.size() == 16);
    CHECK(rep.hist_mu.size() == 16);
    // determinism: same seed, same numbers
    auto rep2 = audit_comparison_lemmas(W, 2000, 42);
    CHECK(rep2.max_w_ratio == rep.max_w_ratio);
    CHECK(rep2.max_mu_over_adot == rep.max_mu_over_adot);
}

TEST_CASE("window and mollifier basics") {
    WeightEvaluator W(WeightParams::test_scale());
    // L_{delta'}(t,xi) = 1 + delta' <xi> / (<xi>^{1/2} + delta' t)
    double dp = W.params().delta_prime;
    double xi = 5000.0, t = 77.0;
    double br = std::sqrt(1.0 + xi * xi);
    double expect = 1.0 + dp * br / (std::sqrt(br) + dp * t);
    CHECK(W.window_L(t, xi) == doctest::Approx(expect).epsilon(1e-13));
}
