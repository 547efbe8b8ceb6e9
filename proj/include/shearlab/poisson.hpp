#pragma once
// Per-mode Dirichlet Poisson solves on [0,1] and velocity recovery.
// (d^2/dy^2 - k^2) phi = f, phi(0)=phi(1)=0. The closed-form Green kernel
// satisfies phi(y) = -int_0^1 f(z) G_k(y,z) dz.

#include "shearlab/grid.hpp"

namespace shearlab {

// Stable evaluation (exponential-difference form; never raw sinh ratios).
double green_function(int k, double y, double z);

// Banded second-order two-point BVP solve (Thomas algorithm, Dirichlet rows).
ModeFunction poisson_mode_solve(const ChannelGrid& g, const ModeFunction& f);

struct Velocity {
    ChannelField psi, ux, uy;
};

// psi per mode with psi(x,0)=psi(x,1)=0 (C0 = 0); ux = -d_y psi with the
// k=0 component integrated directly from <omega> (exactly mean-free);
// uy = d_x psi spectrally.
Velocity velocity_from_vorticity(const ChannelField& omega);

// k=0 x-averaged streamwise velocity from <omega>: u0' = -<omega>, mean(u0)=0.
std::vector<double> mean_ux_from_mean_omega(const std::vector<double>& om_avg, double h);

namespace ref {
// Serial quadrature oracle: phi(y_i) = -sum_j w_j G_k(y_i, y_j) f(y_j).
ModeFunction poisson_green_quadrature(const ChannelGrid& g, const ModeFunction& f);
} // namespace ref

} // namespace shearlab
