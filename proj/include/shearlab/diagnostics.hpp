#pragma once
// Moving-frame diagnostics: the nonlinear change of coordinates
// v = b(y) + Phi(t,y)/t, z = x - t v, the profile F and coefficient functions,
// the frozen-coefficient stream function phi', the auxiliary profile F*, the
// renormalized stream functions Theta/Theta*, nine weighted energy
// functionals, and the bootstrap monitor.

#include <string>
#include <vector>

#include "shearlab/grid.hpp"
#include "shearlab/nonlinear.hpp"
#include "shearlab/profiles.hpp"
#include "shearlab/weights.hpp"

namespace shearlab {

struct CoordinateMap {
    double t = 0.0;
    std::vector<double> v_of_y;  // v(t, y) on y_nodes
    std::vector<double> v_grid;  // uniform over [b(0), b(1)], nv = ny
    std::vector<double> Y;       // inverse map on v_grid
    std::vector<double> Vp, Vdot, Bp, Bpp, Bp0, Bpp0, Favg, H;
    std::vector<double> Vpp_direct, Vpp_product; // b''(Y) - (1/t) d_y(Iomega)(Y)  vs  V' d_v V'
    double identity_residual = 0.0;              // ||H - (B' - V' - <F>)||_inf relative
    double vpp_residual = 0.0;                   // ||Vpp_direct - Vpp_product||_inf relative
};

CoordinateMap build_coordinates(const SimState& s, const ShearProfile& p);

struct ProfileState {
    double t = 0.0;
    int nz = 0, nv = 0;
    // mode-space storage: modes[k][j] over v_grid, k = 0..nz/2
    std::vector<ModeFunction> F, phi, phi_prime, F_star, Theta, Theta_star;
};

// F(t,z,v) = omega(t, z + t v, Y(v)); phi likewise from psi (bicubic)
ProfileState pull_back_profile(const ChannelField& omega, const ChannelField& psi,
                               const CoordinateMap& map, const ShearProfile& p);

// frozen-coefficient stream function:
// phi'_k(t,v) = -int F_k(t,w) Gk(binv(v), binv(w)) e^{i k t (v-w)} / B'0(w) dw
std::vector<ModeFunction> solve_phi_prime(const std::vector<ModeFunction>& F,
                                          const std::vector<double>& v_grid,
                                          const ShearProfile& p, double t);

// running accumulator int_0^t d_z phi' dtau (trapezoid at the call cadence)
class FStarAccumulator {
public:
    void add(const std::vector<ModeFunction>& phi_prime, const std::vector<double>& v_grid,
             double t);
    // F* = F - B''0(v) * accumulated integral
    std::vector<ModeFunction> f_star(const std::vector<ModeFunction>& F,
                                     const std::vector<double>& Bpp0) const;

private:
    std::vector<ModeFunction> acc_;
    std::vector<ModeFunction> last_dzphi_;
    double last_t_ = 0.0;
    bool have_last_ = false;
};

// Theta = (d_z^2 + (d_v - t d_z)^2)(Psi phi); cutoff Psi = Psi(v) fixed per profile
std::vector<ModeFunction> theta_field(const std::vector<ModeFunction>& phi,
                                      const std::vector<double>& v_grid, const ShearProfile& p,
                                      double t);

double psi_cutoff(const ShearProfile& p, double v);

struct EnergyReport {
    double t = 0.0;
    // order: F, F*, F-F*, Theta, Theta*, V'*, B'*, B''*, H
    static constexpr int n_energies = 9;
    double E[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    double D[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0}; // instantaneous |Adot| A integrand
    double B[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0}; // running time integrals of D from t=1
    double tail_fraction = 0.0;                // max weighted tail mass fraction
    bool resolved = true;
    double delta0 = 0.0, delta = 0.0, K = 0.0, eps1 = 0.0;
    static const char* name(int i);
};

// computes the nine instantaneous energies; B entries are filled by EnergyIntegrator
EnergyReport energies(const ProfileState& ps, const CoordinateMap& map,
                      const WeightEvaluator& W, double Kconst);

// accumulates B_g = int_1^t D_g dtau by trapezoid across successive reports
class EnergyIntegrator {
public:
    // call in time order; fills rep.B with the running integrals
    void accumulate(EnergyReport& rep);

private:
    double runningB_[EnergyReport::n_energies] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    double last_D_[EnergyReport::n_energies] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
    double last_t_ = 0.0;
    bool have_last_ = false;
};

struct BootstrapVerdict {
    double t = 0.0;
    double total = 0.0;   // sum of all E + B
    double budget = 0.0;  // eps1^2
    double margin = 0.0;  // budget - total
    bool pass = false;
};

std::vector<BootstrapVerdict> bootstrap_monitor(const std::vector<EnergyReport>& series,
                                                double eps);

// bicubic sample of a channel field (periodic x, clamped y)
double interp_field(const ChannelField& f, double x, double y);

} // namespace shearlab
