#pragma once
// Linearized dynamics: RK4 time-stepping of d_t g = -ik L_k g, generalized
// eigenfunctions via limiting absorption (second-kind Fredholm solve), the
// spectral representation formula for the stream mode, and damping-rate fits.

#include <functional>
#include <vector>

#include "shearlab/fit.hpp"
#include "shearlab/grid.hpp"
#include "shearlab/profiles.hpp"
#include "shearlab/spectral.hpp"

namespace shearlab {

struct LinearSample {
    double t = 0.0;
    std::vector<cplx> g, phi;
    double l2_g = 0.0, l2_phi = 0.0, l2_dyphi = 0.0;
};

// initial data g(0,y) = X(b(y)) e^{-i k a b(y)}; X given as a function of v,
// supported in [b(theta0), b(1-theta0)] (checked)
std::vector<LinearSample> evolve_linear(const ShearProfile& p, int k,
                                        const std::function<cplx(double)>& X, double a,
                                        double T_end, double dt,
                                        const std::vector<double>& out_times,
                                        const ChannelGrid& g);

// closed-form free transport, exact whenever b'' == 0:
// g(t,y) = X(b(y)) e^{-i k b(y) (t + a)}
std::vector<cplx> free_transport_mode(const ShearProfile& p, int k,
                                      const std::function<cplx(double)>& X, double a, double t,
                                      const ChannelGrid& g);

struct DampingFit {
    FitResult uy_proxy;  // |k| * ||phi||_{L^2}
    FitResult ux_fluct;  // ||d_y phi||_{L^2}
};

DampingFit damping_fit(const std::vector<LinearSample>& series, int k, double t1, double t2);

struct GeneralizedEigenfunction {
    int k = 0;
    double y0 = 0.0, eps = 0.0;
    int iota = +1; // sign of the i*eps shift
    std::vector<cplx> psi;
    double fredholm_residual = 0.0; // relative, after the solve
};

GeneralizedEigenfunction generalized_eigenfunction(const ShearProfile& p, int k, double y0,
                                                   double eps, int iota,
                                                   const std::function<cplx(double)>& X, double a,
                                                   const ChannelGrid& g);

// residual of the second-order ODE form evaluated by finite differences,
// relative to the solution scale (independent check of the integral solve)
double eigenfunction_ode_residual(const ShearProfile& p,
                                  const GeneralizedEigenfunction& ge,
                                  const std::function<cplx(double)>& X, double a,
                                  const ChannelGrid& g);

// stream mode phi_k(t,y) at fixed eps:
// -(1/2 pi i) int e^{-i k b(y0) t} b'(y0) [psi^- - psi^+](y, y0) dy0
// (trapezoid over ny0 uniform y0 points)
std::vector<cplx> spectral_representation(const ShearProfile& p, int k,
                                          const std::function<cplx(double)>& X, double a, double t,
                                          double eps, int ny0, const ChannelGrid& g);

struct RepresentationResult {
    std::vector<cplx> phi;      // two-point Richardson extrapolation in eps
    double disagreement = 0.0;  // relative L2 gap between the two eps results
};

RepresentationResult spectral_representation_extrapolated(
    const ShearProfile& p, int k, const std::function<cplx(double)>& X, double a, double t,
    double eps1, double eps2, int ny0, const ChannelGrid& g);

// discrete L2 norm on [0,1] (trapezoid)
double l2_norm(const std::vector<cplx>& f, double h);

} // namespace shearlab
