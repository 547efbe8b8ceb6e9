#pragma once
// Resonant Fourier weight hierarchy: w_NR / w_R / w_k recursions over the
// resonant intervals I_{l,eta}, mollified b_Y, the decreasing radius lambda(t),
// main weights A_NR / A_R / A_k, and regularized time-derivative weights mu.
// All w evaluations are carried in log space (w can underflow for large |eta|).

#include <map>
#include <shared_mutex>
#include <string>
#include <vector>

namespace shearlab {

struct WeightParams {
    double delta0 = 0.1;
    double delta = 0.01;
    double delta_prime = 0.001; // delta/10
    double sigma0 = 0.01;       // fixed
    double K = 10.0;

    static WeightParams physical();   // delta = 0.01
    static WeightParams test_scale(); // delta = 0.5 (threshold 1024)
    double threshold() const;         // delta^{-10}
    void validate() const;
};

enum class WKind { NR, R, K };

struct ResonantStructure {
    double eta = 0.0; // |eta| > threshold
    int k0 = 0;
    std::vector<double> t;        // t[l], l = 0..k0, decreasing, t[0] = 2 eta
    std::vector<double> logw_t;   // log w_NR(t[l], eta)
    std::vector<double> logw_res; // log w_NR(eta/k, eta), k = 1..k0
};

class WeightEvaluator {
public:
    explicit WeightEvaluator(WeightParams p);

    const WeightParams& params() const { return p_; }

    // w_Y(t, eta); k is used only for Y == WKind::K
    double log_w(WKind Y, int k, double t, double eta) const;
    double w(WKind Y, int k, double t, double eta) const;

    // mollified weights b_Y(t, xi)
    double b(WKind Y, int k, double t, double xi) const;

    double lambda(double t) const;

    // main weights A_NR, A_R, A_k
    double A(WKind Y, int k, double t, double xi) const;

    double mu_sharp(double t, double xi) const;
    double mu_star(double t, double xi) const;
    double mu_k(int k, double t, double xi) const;
    double mu_R(double t, double xi) const;

    int k0_of(double eta) const;       // 0 if |eta| <= threshold
    double t_k0(double eta) const;     // t_{k0(eta),eta}; 0 if below threshold
    bool in_resonant_interval(int k, double t, double eta) const; // t in I_{k,eta}

    double window_L(double t, double xi) const;
    static double bump_phi(double x); // fixed even bump: supp [-8/5,8/5], 1 on [-5/4,5/4]
    double bump_d0() const { return d0_; }

    // access to a copy of the memoized structure (diagnostics/tests)
    ResonantStructure structure_copy(double eta) const;

private:
    WeightParams p_;
    double d0_ = 0.0;
    const ResonantStructure& structure(double aeta) const;
    double mollify(double t, double xi, bool mu_variant, WKind Y, int k) const;

    mutable std::map<double, ResonantStructure> cache_;
    mutable std::shared_mutex mtx_;
    mutable std::map<double, double> lambda_cache_;
    mutable std::shared_mutex lmtx_;
};

struct AuditReport {
    int samples = 0;
    unsigned long long seed = 0;
    double delta = 0.0, delta0 = 0.0, delta_prime = 0.0, K = 0.0;
    // Lemma "w ratio" audit: max over samples of w_Y(t,xi)/w_Y(t,eta) / e^{sqrt(delta)|xi-eta|^{1/2}}
    double max_w_ratio = 0.0, max_w_ratio_half = 0.0; // full sample set / first half
    // mu vs |Adot/A| audit (central differences): max of both quotient directions
    double max_mu_over_adot = 0.0, max_adot_over_mu = 0.0;
    bool all_finite = true;
    bool stable = false; // max ratio stable under sample doubling
    // histograms of log10(ratio), 16 bins over [-8, 8], clamped
    std::vector<int> hist_w, hist_mu;
    // derivative closed form on |xi| below threshold: max abs rel error
    double smooth_region_deriv_err = 0.0;
    std::string to_json() const;
};

AuditReport audit_comparison_lemmas(const WeightEvaluator& W, int samples,
                                    unsigned long long seed = 0);

} // namespace shearlab
