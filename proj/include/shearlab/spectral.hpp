#pragma once
// Spectral certification of the linearized operator: dense L_k matrices,
// eigenvalue scans, the compact operator T_{k,y0,eps}, and the
// limiting-absorption constant kappa measured as the smallest singular value
// of I + T in the discrete H^1_k geometry.

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shearlab/grid.hpp"
#include "shearlab/profiles.hpp"

namespace shearlab {

using cplx = std::complex<double>;

struct LkOperator {
    int k = 0;
    Eigen::MatrixXcd matrix; // ny x ny dense discretization
    const ShearProfile* profile = nullptr;
};

// L_k f = b f + b'' * (Green quadrature of f)  (phi_k = -int G_k f)
LkOperator build_Lk(const ShearProfile& p, int k, const ChannelGrid& g);

struct EigenScan {
    int k = 0;
    std::vector<cplx> eigenvalues;
    int flagged_imag = 0;  // |Im| > tol (mode instability pair)
    int flagged_range = 0; // Re outside [b(0)-tol, b(1)+tol]
    bool pass = false;     // no flags (embedded eigenvalues deferred to kappa)
};

EigenScan eigen_scan(const LkOperator& L, double tol);

// Product-quadrature weights: w_j = int hat_j(z) / (b(z) - b(y0) + i eps) dz,
// with b linearized on each cell; exact in eps, stable for eps << h.
std::vector<cplx> singular_hat_weights(const ShearProfile& p, const std::vector<double>& y,
                                       double y0, double eps);

// fixed Gevrey-3/4 cutoff phi(y) = Psi(b(y)), supp Psi = [b(t0/4), b(1-t0/4)],
// Psi = 1 on [b(t0/3), b(1-t0/3)]
double t_cutoff(const ShearProfile& p, double y);

// dense matrix of T_{k,y0,eps} f(y) = phi(y) int G_k(y,z) b''(z) f(z) / (b(z)-b(y0)+i eps) dz
Eigen::MatrixXcd t_operator_matrix(const ShearProfile& p, int k, double y0, double eps,
                                   const ChannelGrid& g);
std::vector<cplx> t_operator_apply(const ShearProfile& p, int k, double y0, double eps,
                                   const std::vector<cplx>& f, const ChannelGrid& g);

// Cholesky factor R (M = R^T R) of the discrete H^1_k Gram matrix
// <f,g> = <f,g>_{L^2} + |k|^{-2} <f',g'>_{L^2} (trapezoid / midpoint rules)
Eigen::MatrixXd h1k_gram_cholesky(const ChannelGrid& g, int k);

// H^1_k norm ||f||_{L^2} + |k|^{-1} ||f'||_{L^2} of a grid function
double h1k_norm(const std::vector<cplx>& f, const ChannelGrid& g, int k);

// operator norm of T in the H^1_k geometry (largest singular value of R T R^{-1})
double t_operator_norm(const ShearProfile& p, int k, double y0, double eps, const ChannelGrid& g);

struct KappaSample {
    int k = 0;
    double y0 = 0.0, eps = 0.0, kappa = 0.0;
};

struct SpectralReport {
    std::vector<int> k_values;
    std::vector<EigenScan> scans;
    std::vector<KappaSample> samples;
    double kappa_min = 0.0;
    double max_eps_drift = 0.0; // max relative change of kappa across last two eps
    bool resolved = false;      // drift <= 20%
    bool pass = false;          // kappa_min > 0 and resolved and no scan flags
    std::string to_json() const;
};

SpectralReport kappa_estimate(const ShearProfile& p, const std::vector<int>& ks,
                              const std::vector<double>& y0s, const std::vector<double>& eps_seq,
                              const ChannelGrid& g);

std::vector<double> default_y0_grid(int n = 64);

} // namespace shearlab
