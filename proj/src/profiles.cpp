#include "shearlab/profiles.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <stdexcept>

#include "shearlab/fft.hpp"

namespace shearlab {

double gevrey_glue(double u, double s) {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    const double p = s / (1.0 - s);
    double g = std::exp(-std::pow(u, -p));
    double gm = std::exp(-std::pow(1.0 - u, -p));
    return g / (g + gm);
}

double gevrey_glue_deriv(double u, double s) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    const double p = s / (1.0 - s);
    double g = std::exp(-std::pow(u, -p));
    double gm = std::exp(-std::pow(1.0 - u, -p));
    double gp = p * std::pow(u, -p - 1.0) * g;
    double gmp = p * std::pow(1.0 - u, -p - 1.0) * gm;
    double sum = g + gm;
    return (gp * gm + g * gmp) / (sum * sum);
}

GevreyCutoff gevrey_cutoff(double a0, double a, double b, double b0, double s) {
    if (!(a0 < a && a <= b && b < b0)) throw std::invalid_argument("gevrey_cutoff: need a0<a<=b<b0");
    if (s != 0.5 && s != 0.75) throw std::invalid_argument("gevrey_cutoff: s in {1/2, 3/4}");
    return GevreyCutoff{a0, a, b, b0, s};
}

double GevreyCutoff::operator()(double x) const {
    if (x <= a0 || x >= b0) return 0.0;
    if (x >= a && x <= b) return 1.0;
    if (x < a) return gevrey_glue((x - a0) / (a - a0), s);
    return gevrey_glue((b0 - x) / (b0 - b), s);
}

double GevreyCutoff::deriv(double x) const {
    if (x <= a0 || x >= b0 || (x >= a && x <= b)) return 0.0;
    if (x < a) return gevrey_glue_deriv((x - a0) / (a - a0), s) / (a - a0);
    return -gevrey_glue_deriv((b0 - x) / (b0 - b), s) / (b0 - b);
}

void ShearProfile::build_inverse(int samples) const {
    std::vector<double> ys(samples), bs(samples);
    for (int i = 0; i < samples; ++i) {
        ys[i] = double(i) / (samples - 1);
        bs[i] = b(ys[i]);
    }
    inv_ = MonotoneCubic::fit(std::move(bs), std::move(ys));
    have_inv_ = true;
}

double ShearProfile::binv(double v) const {
    if (!have_inv_) build_inverse(8193);
    return inv_(v);
}

ShearProfile make_couette() {
    ShearProfile p;
    p.name = "couette";
    p.theta0 = 0.1;
    p.beta0 = 0.05;
    p.amplitude = 0.0;
    p.b = [](double y) { return y; };
    p.b1 = [](double) { return 1.0; };
    p.b2 = [](double) { return 0.0; };
    return p;
}

ShearProfile make_perturbed_monotone(double amplitude, double theta0) {
    if (!(theta0 > 0.0 && theta0 <= 0.1)) throw std::invalid_argument("theta0 in (0, 1/10]");
    if (1.0 + std::min(0.0, amplitude) < theta0 || 1.0 + std::max(0.0, amplitude) > 1.0 / theta0)
        throw std::invalid_argument("make_perturbed_monotone: amplitude violates monotonicity bounds");
    const double lo = 2.0 * theta0, hi = 1.0 - 2.0 * theta0;
    const double w = (hi - lo) / 4.0;
    auto chi = gevrey_cutoff(lo, lo + w, hi - w, hi, 0.5);

    // cumulative integral of chi on a dense grid (composite Simpson per cell)
    const int n = 8193;
    auto I = std::make_shared<std::vector<double>>(n, 0.0);
    const double h = 1.0 / (n - 1);
    for (int i = 1; i < n; ++i) {
        double y0 = (i - 1) * h, y1 = i * h;
        (*I)[i] = (*I)[i - 1] + h / 6.0 * (chi(y0) + 4.0 * chi(0.5 * (y0 + y1)) + chi(y1));
    }
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) xs[i] = i * h;
    auto Icub = std::make_shared<MonotoneCubic>(MonotoneCubic::fit(xs, *I));

    ShearProfile p;
    p.name = "perturbed_monotone";
    p.theta0 = theta0;
    p.beta0 = 0.05;
    p.amplitude = amplitude;
    double A = amplitude;
    p.b = [A, Icub](double y) { return y + A * (*Icub)(y); };
    p.b1 = [A, chi](double y) { return 1.0 + A * chi(y); };
    p.b2 = [A, chi](double y) { return A * chi.deriv(y); };
    return p;
}

namespace {
GevreyNormResult weighted_sum_1d(const std::vector<std::complex<double>>& c, int N, double measure,
                                 double lambda, double s) {
    GevreyNormResult r;
    double total = 0.0, tail = 0.0;
    for (int m = 0; m < N; ++m) {
        int mt = (m <= N / 2) ? m : m - N;
        double xi = 3.14159265358979323846 * mt;
        double wgt = std::exp(2.0 * lambda * std::pow(std::sqrt(1.0 + xi * xi), s));
        double term = wgt * std::norm(c[m]);
        total += term;
        if (std::abs(mt) >= int(0.9 * (N / 2))) tail += term;
    }
    r.value = std::sqrt(measure * total);
    r.tail_fraction = (total > 0.0) ? tail / total : 0.0;
    r.resolved = std::isfinite(total) && (total == 0.0 || tail <= 1e-8 * total);
    if (!std::isfinite(total)) r.value = std::numeric_limits<double>::infinity();
    return r;
}
} // namespace

GevreyNormResult gevrey_norm_estimate(const std::vector<double>& f, double lambda, double s) {
    const int n = int(f.size());
    const int N = 2 * (n - 1);
    std::vector<std::complex<double>> buf(N, {0.0, 0.0});
    for (int j = 0; j < n; ++j) buf[j] = f[j];
    fft::dft_many(buf.data(), N, 1, 1, 1, -1);
    for (auto& c : buf) c /= double(N);
    return weighted_sum_1d(buf, N, 2.0, lambda, s); // box length 2
}

GevreyNormResult gevrey_norm_estimate(const ChannelField& f, double lambda, double s) {
    const int nx = f.grid.nx, ny = f.grid.ny;
    const int N = 2 * (ny - 1);
    std::vector<std::complex<double>> buf(size_t(nx) * N, {0.0, 0.0});
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) buf[size_t(i) * N + j] = f.at(i, j);
    fft::dft_many(buf.data(), N, nx, 1, N, -1);        // transform in y
    fft::dft_many(buf.data(), nx, N, N, 1, -1);        // transform in x
    const double norml = 1.0 / (double(nx) * N);
    GevreyNormResult r;
    double total = 0.0, tail = 0.0;
    for (int i = 0; i < nx; ++i) {
        int kt = (i <= nx / 2) ? i : i - nx;
        for (int m = 0; m < N; ++m) {
            int mt = (m <= N / 2) ? m : m - N;
            double xi = 3.14159265358979323846 * mt;
            double mod = std::sqrt(1.0 + double(kt) * kt + xi * xi);
            double wgt = std::exp(2.0 * lambda * std::pow(mod, s));
            double term = wgt * std::norm(buf[size_t(i) * N + m] * norml);
            total += term;
            if (std::abs(mt) >= int(0.9 * (N / 2)) || std::abs(kt) >= int(0.9 * (nx / 2))) tail += term;
        }
    }
    r.value = std::sqrt(2.0 * 2.0 * 3.14159265358979323846 * total); // box measure 2*pi x 2
    r.tail_fraction = (total > 0.0) ? tail / total : 0.0;
    r.resolved = std::isfinite(total) && ((total == 0.0) || tail <= 1e-8 * total);
    if (!std::isfinite(total)) r.value = std::numeric_limits<double>::infinity();
    return r;
}

AssumptionAReport verify_assumption_A(const ShearProfile& p, int ny) {
    AssumptionAReport r;
    const int n = 10 * ny;
    r.min_b1 = 1e300;
    r.max_b1 = -1e300;
    r.b_inf = 0.0;
    r.support_ok = true;
    for (int i = 0; i <= n; ++i) {
        double y = double(i) / n;
        double b1 = p.b1(y);
        r.min_b1 = std::min(r.min_b1, b1);
        r.max_b1 = std::max(r.max_b1, b1);
        r.b_inf = std::max(r.b_inf, std::abs(p.b(y)));
        if ((y < 2.0 * p.theta0 || y > 1.0 - 2.0 * p.theta0) && std::abs(p.b2(y)) > 1e-12)
            r.support_ok = false;
    }
    r.deriv_bounds = (r.min_b1 >= p.theta0 - 1e-12) && (r.max_b1 <= 1.0 / p.theta0 + 1e-12);
    const int m = 4097;
    std::vector<double> b2s(m);
    for (int i = 0; i < m; ++i) b2s[i] = p.b2(double(i) / (m - 1));
    auto gn = gevrey_norm_estimate(b2s, p.beta0, 0.5);
    r.gevrey_b2 = gn.value;
    r.gevrey_resolved = gn.resolved;
    r.total = r.b_inf + r.gevrey_b2;
    r.size_ok = gn.resolved && r.total <= 1.0 / p.theta0 + 1e-12;
    r.pass = r.deriv_bounds && r.support_ok && r.size_ok;
    return r;
}

std::string AssumptionAReport::to_json() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "{\"pass\":%s,\"deriv_bounds\":%s,\"support_ok\":%s,\"size_ok\":%s,"
                  "\"min_b1\":%.17g,\"max_b1\":%.17g,\"b_inf\":%.17g,\"gevrey_b2\":%.17g,"
                  "\"total\":%.17g,\"gevrey_resolved\":%s}",
                  pass ? "true" : "false", deriv_bounds ? "true" : "false",
                  support_ok ? "true" : "false", size_ok ? "true" : "false", min_b1, max_b1, b_inf,
                  gevrey_b2, total, gevrey_resolved ? "true" : "false");
    return buf;
}

std::string profile_to_json(const ShearProfile& p, const ChannelGrid& g) {
    std::string out = "{\"name\":\"" + p.name + "\",";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "\"theta0\":%.17g,\"beta0\":%.17g,\"amplitude\":%.17g,", p.theta0,
                  p.beta0, p.amplitude);
    out += buf;
    auto arr = [&](const char* key, const std::function<double(double)>& f) {
        out += std::string("\"") + key + "\":[";
        for (int j = 0; j < g.ny; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g%s", f(g.y_nodes[j]), j + 1 < g.ny ? "," : "");
            out += buf;
        }
        out += "]";
    };
    arr("b", p.b);
    out += ",";
    arr("b1", p.b1);
    out += ",";
    arr("b2", p.b2);
    out += "}";
    return out;
}

} // namespace shearlab
