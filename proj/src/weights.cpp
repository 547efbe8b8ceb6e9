#include "shearlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <stdexcept>

#include "shearlab/profiles.hpp"

namespace shearlab {

namespace {

constexpr int kGL = 129;          // mollification rule size
constexpr double kSupp = 1.6;     // bump support half-width
constexpr size_t kCacheCap = 16384;

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int j = 2; j <= n; ++j) {
                double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            double dt = -p1 / dp;
            t += dt;
            if (std::abs(dt) < 1e-15) {
                // one clean-up iteration, then stop
                p0 = 1.0;
                p1 = t;
                for (int j = 2; j <= n; ++j) {
                    double p2 = ((2.0 * j - 1.0) * t * p1 - (j - 1.0) * p0) / j;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (t * p1 - p0) / (t * t - 1.0);
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

struct GLRule {
    std::vector<double> x, w;
};
const GLRule& gl_rule() {
    static const GLRule rule = [] {
        GLRule r;
        gauss_legendre(kGL, r.x, r.w);
        return r;
    }();
    return rule;
}
const std::vector<double>& gl_nodes() { return gl_rule().x; }
const std::vector<double>& gl_weights() { return gl_rule().w; }

double jbracket(double a) { return std::sqrt(1.0 + a * a); }

} // namespace

WeightParams WeightParams::physical() { return WeightParams{}; }

WeightParams WeightParams::test_scale() {
    WeightParams p;
    p.delta = 0.5;
    p.delta_prime = 0.05;
    return p;
}

double WeightParams::threshold() const { return std::pow(delta, -10.0); }

void WeightParams::validate() const {
    // physical mode satisfies delta' < delta < delta0 < 1; the structural
    // test-scale mode (delta = 0.5 > delta0) is first-class, so only the
    // orderings common to both modes are enforced
    if (!(0.0 < delta_prime && delta_prime < delta && delta < 1.0 && 0.0 < delta0 && delta0 < 1.0))
        throw std::invalid_argument("WeightParams: need 0 < delta' < delta < 1 and delta0 in (0,1)");
    if (sigma0 != 0.01) throw std::invalid_argument("WeightParams: sigma0 = 0.01 is fixed");
    if (!(K >= 1.0)) throw std::invalid_argument("WeightParams: K >= 1");
}

WeightEvaluator::WeightEvaluator(WeightParams p) : p_(p) {
    p_.validate();
    // d0 = int phi, computed with the same quadrature used for b_Y so that
    // mollifying a constant returns it exactly.
    const auto& u = gl_nodes();
    const auto& gw = gl_weights();
    double s = 0.0;
    for (int i = 0; i < kGL; ++i) s += gw[i] * bump_phi(kSupp * u[i]);
    d0_ = kSupp * s;
}

double WeightEvaluator::bump_phi(double x) {
    double ax = std::abs(x);
    if (ax >= kSupp) return 0.0;
    if (ax <= 1.25) return 1.0;
    return gevrey_glue((kSupp - ax) / (kSupp - 1.25), 0.5);
}

int WeightEvaluator::k0_of(double eta) const {
    double aeta = std::abs(eta);
    if (aeta <= p_.threshold()) return 0;
    return int(std::floor(std::sqrt(p_.delta * p_.delta * p_.delta * aeta)));
}

const ResonantStructure& WeightEvaluator::structure(double aeta) const {
    {
        std::shared_lock lk(mtx_);
        auto it = cache_.find(aeta);
        if (it != cache_.end()) return it->second;
    }
    ResonantStructure s;
    s.eta = aeta;
    s.k0 = k0_of(aeta);
    const int k0 = s.k0;
    const double d0c = p_.delta0, d2 = p_.delta * p_.delta;
    s.t.resize(k0 + 1);
    s.logw_t.resize(k0 + 1);
    s.logw_res.resize(k0);
    s.t[0] = 2.0 * aeta;
    s.logw_t[0] = 0.0;
    for (int k = 1; k <= k0; ++k) {
        s.t[k] = 0.5 * (aeta / (k + 1) + aeta / k);
        double r = aeta / k;
        // growth branch down to the resonance point eta/k ...
        double lr = s.logw_t[k - 1] - d0c * std::log1p(d2 * (s.t[k - 1] - r));
        s.logw_res[k - 1] = lr;
        // ... then the (1+delta0)-power drop to the left endpoint t_k
        s.logw_t[k] = lr - (1.0 + d0c) * std::log1p(d2 * (r - s.t[k]));
    }
    {
        std::unique_lock lk(mtx_);
        if (cache_.size() < kCacheCap) return cache_.emplace(aeta, std::move(s)).first->second;
    }
    // cache full: park the structure in thread-local scratch (references into
    // the map stay valid for the process lifetime; entries are never erased)
    thread_local ResonantStructure scratch;
    scratch = std::move(s);
    return scratch;
}

ResonantStructure WeightEvaluator::structure_copy(double eta) const {
    double aeta = std::abs(eta);
    if (aeta <= p_.threshold()) return ResonantStructure{};
    return structure(aeta);
}

bool WeightEvaluator::in_resonant_interval(int k, double t, double eta) const {
    double aeta = std::abs(eta);
    if (aeta <= p_.threshold() || k == 0) return false;
    int kk = (eta > 0.0) ? k : -k; // I_{k,eta} = I_{-k,-eta}
    if (kk < 1) return false;
    const auto& s = structure(aeta);
    if (kk > s.k0) return false;
    return t >= s.t[kk] && t <= s.t[kk - 1];
}

double WeightEvaluator::log_w(WKind Y, int k, double t, double eta) const {
    double aeta = std::abs(eta);
    if (aeta <= p_.threshold()) return 0.0;
    if (t < 0.0) t = 0.0;
    const auto& s = structure(aeta);
    if (t >= s.t[0]) return 0.0;
    bool resonant_kind = (Y == WKind::R) || (Y == WKind::K && in_resonant_interval(k, t, eta));
    const double d0c = p_.delta0, d2 = p_.delta * p_.delta;
    if (t < s.t[s.k0]) {
        // small-time closure: log-linear interpolation between e^{-delta sqrt(eta)}
        // at t=0 and w(t_{k0}) at the last resonant time
        double beta = 1.0 - t / s.t[s.k0];
        return beta * (-p_.delta * std::sqrt(aeta)) + (1.0 - beta) * s.logw_t[s.k0];
    }
    // locate l with t in [t_l, t_{l-1}] (t decreasing)
    auto it = std::lower_bound(s.t.begin(), s.t.end(), t, std::greater<double>());
    int l = int(it - s.t.begin());
    if (l < 1) l = 1;
    if (l > s.k0) l = s.k0;
    double r = aeta / l;
    double lw;
    if (t >= r)
        lw = s.logw_t[l - 1] + d0c * (std::log1p(d2 * (t - r)) - std::log1p(d2 * (s.t[l - 1] - r)));
    else
        lw = s.logw_res[l - 1] - (1.0 + d0c) * std::log1p(d2 * (r - t));
    if (resonant_kind) {
        double dist = std::abs(t - r);
        double win = aeta / (8.0 * double(l) * l);
        if (dist <= win) lw += std::log1p(d2 * dist) - std::log1p(d2 * win);
    }
    return lw;
}

double WeightEvaluator::w(WKind Y, int k, double t, double eta) const {
    return std::exp(log_w(Y, k, t, eta));
}

double WeightEvaluator::t_k0(double eta) const {
    double aeta = std::abs(eta);
    if (aeta <= p_.threshold()) return 0.0;
    const auto& s = structure(aeta);
    return s.t[s.k0];
}

double WeightEvaluator::window_L(double t, double xi) const {
    double ax = jbracket(xi);
    return 1.0 + p_.delta_prime * ax / (std::sqrt(ax) + p_.delta_prime * t);
}

double WeightEvaluator::mollify(double t, double xi, bool mu_variant, WKind Y, int k) const {
    const double L = window_L(t, xi);
    const double thr = p_.threshold();
    // fast paths: the integrand is constant over the whole window
    if (std::abs(xi) + kSupp * L <= thr) return mu_variant ? 0.0 : 1.0;
    if (mu_variant && t > 2.0 * (std::abs(xi) + kSupp * L)) return 0.0;
    const auto& u = gl_nodes();
    const auto& gw = gl_weights();
    double s = 0.0;
    for (int i = 0; i < kGL; ++i) {
        double ui = kSupp * u[i];
        double rho = xi - ui * L;
        double f = mu_variant ? mu_sharp(t, rho) : w(Y, k, t, rho);
        s += gw[i] * bump_phi(ui) * f;
    }
    return kSupp * s / d0_;
}

double WeightEvaluator::b(WKind Y, int k, double t, double xi) const {
    return mollify(t, xi, false, Y, k);
}

double WeightEvaluator::lambda(double t) const {
    if (t <= 0.0) return 1.5 * p_.delta0;
    {
        std::shared_lock lk(lmtx_);
        auto it = lambda_cache_.find(t);
        if (it != lambda_cache_.end()) return it->second;
    }
    // integral of <tau>^{-1-sigma0} over [0,t]: 32-pt GL on [0,min(t,1)],
    // then doubling segments [1,2],[2,4],... (smooth, slowly decaying tail)
    static std::vector<double> x32, w32;
    static std::once_flag once;
    std::call_once(once, [] { gauss_legendre(32, x32, w32); });
    auto seg = [&](double a2, double b2) {
        double s = 0.0, mid = 0.5 * (a2 + b2), hw = 0.5 * (b2 - a2);
        for (int i = 0; i < 32; ++i) {
            double tau = mid + hw * x32[i];
            s += w32[i] * std::pow(jbracket(tau), -1.0 - p_.sigma0);
        }
        return hw * s;
    };
    double I = seg(0.0, std::min(t, 1.0));
    double a = 1.0;
    while (a < t) {
        double b2 = std::min(2.0 * a, t);
        I += seg(a, b2);
        a = b2;
    }
    double lam = 1.5 * p_.delta0 - p_.delta0 * p_.sigma0 * p_.sigma0 * I;
    std::unique_lock lk(lmtx_);
    if (lambda_cache_.size() > kCacheCap) lambda_cache_.clear();
    lambda_cache_.emplace(t, lam);
    return lam;
}

double WeightEvaluator::A(WKind Y, int k, double t, double xi) const {
    double lam = lambda(t);
    double sq_xi = std::sqrt(jbracket(xi));
    double sd = std::sqrt(p_.delta);
    if (Y == WKind::K) {
        double sq_kxi = std::pow(1.0 + double(k) * k + xi * xi, 0.25);
        double bk = b(WKind::K, k, t, xi);
        return std::exp(lam * sq_kxi) *
               (std::exp(sd * sq_xi) / bk + std::exp(sd * std::sqrt(std::abs(double(k)))));
    }
    return std::exp(lam * sq_xi) * std::exp(sd * sq_xi) / b(Y, k, t, xi);
}

double WeightEvaluator::mu_sharp(double t, double xi) const {
    double axi = std::abs(xi);
    if (axi <= p_.threshold() || t > 2.0 * axi) return 0.0;
    const auto& s = structure(axi);
    const double d2 = p_.delta * p_.delta;
    if (t < s.t[s.k0]) return d2;
    auto it = std::lower_bound(s.t.begin(), s.t.end(), t, std::greater<double>());
    int l = std::clamp(int(it - s.t.begin()), 1, s.k0);
    return d2 / (1.0 + d2 * std::abs(t - axi / l));
}

double WeightEvaluator::mu_star(double t, double xi) const {
    return mollify(t, xi, true, WKind::NR, 0);
}

double WeightEvaluator::mu_k(int k, double t, double xi) const {
    double sq_kxi = std::pow(1.0 + double(k) * k + xi * xi, 0.25);
    double first = sq_kxi / std::pow(jbracket(t), 1.0 + p_.sigma0);
    double sd = std::sqrt(p_.delta);
    double gate = 1.0 + std::exp(sd * (std::sqrt(std::abs(double(k))) - std::sqrt(jbracket(xi)))) *
                            b(WKind::K, k, t, xi);
    return first + mu_star(t, xi) / gate;
}

double WeightEvaluator::mu_R(double t, double xi) const {
    return std::sqrt(jbracket(xi)) / std::pow(jbracket(t), 1.0 + p_.sigma0) + mu_star(t, xi);
}

namespace {
void hist_add(std::vector<int>& h, double ratio) {
    if (h.size() != 16) h.assign(16, 0);
    if (!(ratio > 0.0) || !std::isfinite(ratio)) return;
    double l = std::log10(ratio);
    int bin = std::clamp(int(std::floor((l + 8.0) * 16.0 / 16.0)), 0, 15);
    h[bin]++;
}
} // namespace

AuditReport audit_comparison_lemmas(const WeightEvaluator& W, int samples,
                                    unsigned long long seed) {
    const auto& p = W.params();
    AuditReport r;
    r.samples = samples;
    r.seed = seed;
    r.delta = p.delta;
    r.delta0 = p.delta0;
    r.delta_prime = p.delta_prime;
    r.K = p.K;
    r.hist_w.assign(16, 0);
    r.hist_mu.assign(16, 0);
    std::mt19937_64 rng(seed);
    const double thr = p.threshold();
    const double ximax = std::max(10.0 * thr, 1.0e5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto sample_xi = [&] {
        // log-uniform magnitude above the resonant threshold, random sign
        double m = std::exp(std::log(thr * 1.0001) +
                            u01(rng) * (std::log(ximax) - std::log(thr * 1.0001)));
        return (u01(rng) < 0.5) ? -m : m;
    };
    const double sd = std::sqrt(p.delta);
    double half_max = 0.0;
    for (int i = 0; i < samples; ++i) {
        double xi = sample_xi();
        double eta = xi + (u01(rng) - 0.5) * 100.0;
        double t = u01(rng) * 2.2 * std::max(std::abs(xi), std::abs(eta));
        int k = 1 + int(u01(rng) * 8.0);
        if (u01(rng) < 0.5) k = -k;
        for (WKind Y : {WKind::NR, WKind::R, WKind::K}) {
            double lwx = W.log_w(Y, k, t, xi);
            double lwe = W.log_w(Y, k, t, eta);
            double bound = sd * std::sqrt(std::abs(xi - eta));
            double ratio = std::exp(std::abs(lwx - lwe) - bound);
            if (!std::isfinite(ratio)) r.all_finite = false;
            r.max_w_ratio = std::max(r.max_w_ratio, ratio);
            if (i < samples / 2) r.max_w_ratio_half = std::max(r.max_w_ratio_half, ratio);
            hist_add(r.hist_w, ratio);
        }
        // mu_k vs |Adot_k / A_k| by central differences
        double h = 1e-3 * jbracket(t);
        double Ap = W.A(WKind::K, k, t + h, xi);
        double Am = W.A(WKind::K, k, std::max(t - h, 0.0), xi);
        double A0 = W.A(WKind::K, k, t, xi);
        double adot = std::abs(Ap - Am) / (2.0 * h) / A0;
        double mu = W.mu_k(k, t, xi);
        if (!std::isfinite(adot) || !std::isfinite(mu) || mu <= 0.0) r.all_finite = false;
        double q1 = mu / std::max(adot, 1e-300);
        double q2 = adot / mu;
        r.max_mu_over_adot = std::max(r.max_mu_over_adot, q1);
        r.max_adot_over_mu = std::max(r.max_adot_over_mu, q2);
        hist_add(r.hist_mu, q2);
    }
    r.stable = r.all_finite && std::isfinite(r.max_w_ratio) &&
               (r.max_w_ratio <= 4.0 * std::max(r.max_w_ratio_half, 1e-300));
    // smooth-region derivative closed form: below threshold b_Y = 1 so
    // |Adot_Y / A_Y| = |lambda'(t)| <xi>^{1/2}
    double errmax = 0.0;
    for (int i = 0; i < 32; ++i) {
        double xi = 0.9 * thr * (i + 1) / 32.0;
        double t = 1.0 + 3.0 * i;
        double h = 1e-4 * jbracket(t);
        double Ap = W.A(WKind::NR, 0, t + h, xi);
        double Am = W.A(WKind::NR, 0, t - h, xi);
        double A0 = W.A(WKind::NR, 0, t, xi);
        double num = std::abs(Ap - Am) / (2.0 * h) / A0;
        double lamp = p.delta0 * p.sigma0 * p.sigma0 * std::pow(jbracket(t), -1.0 - p.sigma0);
        double ref = lamp * std::sqrt(jbracket(xi));
        errmax = std::max(errmax, std::abs(num - ref) / ref);
    }
    r.smooth_region_deriv_err = errmax;
    return r;
}

std::string AuditReport::to_json() const {
    auto hist_json = [](const std::vector<int>& h) {
        std::string s = "[";
        char b[32];
        for (size_t i = 0; i < h.size(); ++i) {
            std::snprintf(b, sizeof(b), "%d%s", h[i], i + 1 < h.size() ? "," : "");
            s += b;
        }
        return s + "]";
    };
    char buf[1024];
    std::snprintf(buf, sizeof(buf),
                  "{\"samples\":%d,\"seed\":%llu,\"delta\":%.17g,\"delta0\":%.17g,"
                  "\"delta_prime\":%.17g,\"K\":%.17g,\"max_w_ratio\":%.17g,"
                  "\"max_w_ratio_half\":%.17g,\"max_mu_over_adot\":%.17g,"
                  "\"max_adot_over_mu\":%.17g,\"all_finite\":%s,\"stable\":%s,"
                  "\"smooth_region_deriv_err\":%.17g,",
                  samples, seed, delta, delta0, delta_prime, K, max_w_ratio, max_w_ratio_half,
                  max_mu_over_adot, max_adot_over_mu, all_finite ? "true" : "false",
                  stable ? "true" : "false", smooth_region_deriv_err);
    std::string out = buf;
    out += "\"hist_w_log10\":" + hist_json(hist_w) + ",\"hist_mu_log10\":" + hist_json(hist_mu) + "}";
    return out;
}

} // namespace shearlab
