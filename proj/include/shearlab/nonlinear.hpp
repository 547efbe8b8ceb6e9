#pragma once
// Pseudo-spectral (spectral x / fourth-order FD y) time integration of the
// perturbation vorticity equation
//   d_t omega = -d_x((b + u^x) omega) - d_y(u^y omega) + b'' d_x psi,
// written in divergence form so the vorticity integral is conserved to
// roundoff. RK4 in time; 2/3-rule dealiasing in x.

#include <functional>
#include <string>
#include <vector>

#include "shearlab/grid.hpp"
#include "shearlab/poisson.hpp"
#include "shearlab/profiles.hpp"

namespace shearlab {

struct SimConfig {
    ShearProfile profile;
    ChannelGrid grid;
    double eps = 1e-3;     // initial-data amplitude
    double T_end = 100.0;
    double dt = 0.02;
    double out_every = 1.0; // diagnostics cadence
    bool dealias = true;
    std::string initial_shape = "cos_bump"; // default eps cos(x) chi(y)
};

struct SimState {
    double t = 0.0;
    ChannelField omega;
    std::vector<double> Phi;    // int_0^t <u^x>(tau, y) dtau per y node
    std::vector<double> Iomega; // int_0^t <omega>(tau, y) dtau per y node
};

// default data eps cos(x) chi(y), chi a Gevrey-1/2 bump in [2 t0, 1-2 t0]
ChannelField make_initial_data(const ChannelGrid& g, double theta0, double eps);
// arbitrary shape, projected to zero x-mean
ChannelField make_initial_data(const ChannelGrid& g,
                               const std::function<double(double, double)>& f);

ChannelField rhs(const ChannelField& omega, const ShearProfile& p, bool dealias = true);

namespace ref {
// serial twin of rhs (identical arithmetic, no OpenMP); testing/bench oracle
ChannelField rhs_serial(const ChannelField& omega, const ShearProfile& p, bool dealias = true);
} // namespace ref

// one RK4 step; accumulates Phi and Iomega by trapezoid over the step
void step_rk4(SimState& s, const ShearProfile& p, double dt, bool dealias = true);

struct DiagnosticsRow {
    double t = 0.0;
    double supmin_y = 0.0, supmax_y = 0.0; // support extent of omega
    double uy_inf = 0.0;                   // ||u^y||_inf
    double uxfluct_inf = 0.0;              // ||u^x - <u^x>||_inf
    double mass = 0.0;                     // int int omega
    double energy = 0.0;                   // (1/2) int |u|^2
};

struct MeanFlowSnapshot {
    double t = 0.0;
    std::vector<double> mean_ux;        // <u^x>(y)
    std::vector<double> mean_omdxpsi;   // <omega d_x psi>(y)
};

struct RunResult {
    std::vector<DiagnosticsRow> rows;
    std::vector<MeanFlowSnapshot> mean_history;
    SimState final_state;
    bool aborted = false;
    std::string abort_reason;
};

// callback runs at each output time (including t=0) with the current state
// and the freshly computed velocity
using RunCallback =
    std::function<void(const SimState&, const Velocity&, const DiagnosticsRow&)>;

RunResult run(const SimConfig& cfg, const RunCallback& cb = nullptr);

struct MeanFlowReport {
    double max_rel_mismatch = 0.0; // d/dt<u^x> vs <omega d_x psi>
    double wall_max = 0.0;         // max |<u^x>| on [0,theta0] U [1-theta0,1]
    bool pass = false;
};

MeanFlowReport mean_flow_monitor(const std::vector<MeanFlowSnapshot>& history, double theta0,
                                 const ChannelGrid& g, double eps);

// support extent [supmin, supmax] of |f| above tol * max|f|
void support_extent(const ChannelField& f, double tol, double* supmin, double* supmax);

} // namespace shearlab
