#pragma once
// Background shear flows b(y) with theta0 <= b' <= 1/theta0 and b'' supported
// in [2 theta0, 1 - 2 theta0]; Gevrey cutoffs; empirical Gevrey-norm estimator.

#include <functional>
#include <string>

#include "shearlab/grid.hpp"
#include "shearlab/interp.hpp"

namespace shearlab {

struct GevreyCutoff {
    double a0 = 0, a = 0, b = 0, b0 = 0; // support [a0,b0], plateau [a,b]
    double s = 0.5;                      // Gevrey index (1/2 or 3/4)
    double operator()(double x) const;
    double deriv(double x) const;
};

// transition glue: g(u) = exp(-u^{-s/(1-s)}), G(u) = g(u)/(g(u)+g(1-u))
double gevrey_glue(double u, double s);
double gevrey_glue_deriv(double u, double s);
GevreyCutoff gevrey_cutoff(double a0, double a, double b, double b0, double s);

struct ShearProfile {
    std::string name;
    double theta0 = 0.1;
    double beta0 = 0.05;
    double amplitude = 0.0;
    std::function<double(double)> b, b1, b2; // b, b', b'' closed form

    double binv(double v) const; // monotone-cubic inverse, built lazily
    void build_inverse(int samples = 4097) const;

private:
    mutable MonotoneCubic inv_;
    mutable bool have_inv_ = false;
};

ShearProfile make_couette();
// b(y) = y + amplitude * int_0^y chi, chi a Gevrey-1/2 bump in [2 theta0, 1-2 theta0]
ShearProfile make_perturbed_monotone(double amplitude, double theta0);

struct GevreyNormResult {
    double value = 0.0;
    bool resolved = true;       // false: top retained band carries > 1e-8 of weighted mass
    double tail_fraction = 0.0; // weighted mass fraction in the top band
};

// f sampled on [0,1] (uniform, endpoints included, f(0)=f(1)=0 expected);
// zero-extended to a period-2 box. lambda=0 reproduces the L^2 norm.
GevreyNormResult gevrey_norm_estimate(const std::vector<double>& f, double lambda, double s);
// 2D variant on T x [0,1], zero-extended in y.
GevreyNormResult gevrey_norm_estimate(const ChannelField& f, double lambda, double s);

struct AssumptionAReport {
    bool pass = false;
    bool deriv_bounds = false, support_ok = false, size_ok = false;
    double min_b1 = 0, max_b1 = 0, b_inf = 0, gevrey_b2 = 0, total = 0;
    bool gevrey_resolved = true;
    std::string to_json() const;
};

AssumptionAReport verify_assumption_A(const ShearProfile& p, int ny = 257);

std::string profile_to_json(const ShearProfile& p, const ChannelGrid& g);

} // namespace shearlab
