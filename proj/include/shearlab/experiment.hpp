#pragma once
// Experiment drivers: validated JSON experiment specs, the six subcommands
// (check-profile, spectral-scan, weights-audit, linear-damping, nonlinear-run,
// theorem-rates), deterministic CSV/JSON artifact writers, and the decay-rate
// post-processing. Exit codes: 0 pass, 2 quantitative failure, 1 config error.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "shearlab/diagnostics.hpp"
#include "shearlab/nonlinear.hpp"
#include "shearlab/profiles.hpp"
#include "shearlab/weights.hpp"

namespace shearlab {

struct ExperimentSpec {
    std::string subcommand;

    // profile
    std::string profile_type = "perturbed"; // "couette" | "perturbed"
    double amplitude = 0.1;
    double theta0 = 0.1;

    // grid
    int nx = 128, ny = 257;

    // weights ("physical" | "test")
    std::string weight_scale = "physical";
    double delta0 = 0.1, delta = 0.0, delta_prime = 0.0, K = 10.0; // 0 = scale default

    // run parameters
    double eps = 1e-3;
    double T_end = 100.0, dt = 0.02, out_every = 1.0;
    int k = 1;
    int kmin = 1, kmax = 8;
    double mod_a = 0.0;              // initial-phase modulation
    double fit_t1 = 10.0, fit_t2 = 100.0;
    std::vector<double> eps_seq;     // limiting-absorption epsilon sequence
    std::vector<double> rep_eps;     // representation-formula epsilon pair
    std::vector<double> rep_times;   // representation cross-check times
    int ny0 = 2049;                  // representation y0 quadrature points
    int samples = 10000;             // audit sample count
    bool snapshots = false;          // write fields/*.bin
    bool energies_on = true;         // nonlinear-run: compute the energy series

    // pass thresholds (live in the spec file, not in code); names documented
    // in docs/spec.schema.json
    std::map<std::string, double> thresholds;

    std::string out_dir = "out";
    std::uint64_t seed = 12345;
    int threads = 0;

    WeightParams weight_params() const;
    ShearProfile make_profile() const;
    double threshold(const std::string& name, double fallback) const;
};

// Parse + validate a spec document (format published in docs/spec.schema.json).
// Errors carry field paths, e.g. "grid.nx: expected positive integer".
ExperimentSpec parse_spec_json(const std::string& text, std::vector<std::string>& errors);
ExperimentSpec load_spec_file(const std::string& path, std::vector<std::string>& errors);

// dispatch on spec.subcommand; creates out_dir, writes report.json + CSVs
int run_experiment(const ExperimentSpec& spec);

int cmd_check_profile(const ExperimentSpec& spec);
int cmd_spectral_scan(const ExperimentSpec& spec);
int cmd_weights_audit(const ExperimentSpec& spec);
int cmd_linear_damping(const ExperimentSpec& spec);
int cmd_nonlinear_run(const ExperimentSpec& spec);
int cmd_theorem_rates(const ExperimentSpec& spec);

// ---- shared machinery (also used by tests/acceptance) ----

struct NonlinearLabResult {
    RunResult run;
    std::vector<double> t_out;
    std::vector<EnergyReport> energy_series;     // empty when energies off
    std::vector<BootstrapVerdict> verdicts;      // empty when energies off
    std::vector<double> identity_residual;       // per output time
    std::vector<double> vpp_residual;
    std::vector<double> H_l2;                    // ||H(t)||_{L^2(v)}
    std::vector<std::vector<ModeFunction>> F_history; // profile snapshots
    std::vector<std::vector<double>> meanF_history;   // <F>(v) per output
    std::vector<double> v_grid;                  // final v grid
    std::vector<double> v_of_y_final;
};

// one full nonlinear run with moving-frame diagnostics at the output cadence
NonlinearLabResult run_nonlinear_lab(const SimConfig& cfg, const WeightParams& wp,
                                     bool with_energies, bool keep_F = true);

// u_inf on y_nodes from a late-time <F> snapshot: solve psi'' = <F_inf>(v(y)),
// psi(0) = psi(1) = 1, u_inf = -psi'; <F_inf> by two-point Richardson in 1/t
std::vector<double> u_infinity_from_meanF(const std::vector<double>& meanF_T,
                                          const std::vector<double>& meanF_half,
                                          const std::vector<double>& v_grid,
                                          const std::vector<double>& v_of_y,
                                          const ChannelGrid& g);

// L2(z,v) distance between two profile snapshots (mode sums, trapezoid in v)
double profile_l2_distance(const std::vector<ModeFunction>& a,
                           const std::vector<ModeFunction>& b, double dv);

// deterministic formatting helpers (%.17g); shared by all writers
std::string fmt_g17(double x);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

} // namespace shearlab
