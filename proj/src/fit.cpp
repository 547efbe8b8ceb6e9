#include "shearlab/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace shearlab {

FitResult linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = int(xs.size());
    if (n < 2 || ys.size() != xs.size()) throw std::invalid_argument("linear_fit: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    double denom = n * sxx - sx * sx;
    FitResult r;
    r.n = n;
    r.slope = (n * sxy - sx * sy) / denom;
    r.intercept = (sy - r.slope * sx) / n;
    if (n > 2) {
        double ss = 0;
        for (int i = 0; i < n; ++i) {
            double e = ys[i] - (r.intercept + r.slope * xs[i]);
            ss += e * e;
        }
        double se = std::sqrt(ss / (n - 2) / (sxx - sx * sx / n));
        r.ci95 = 1.96 * se;
    }
    return r;
}

FitResult loglog_fit(const std::vector<double>& t, const std::vector<double>& v, double t1, double t2) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t1 || t[i] > t2 || t[i] <= 0.0 || v[i] <= 0.0) continue;
        xs.push_back(std::log(t[i]));
        ys.push_back(std::log(v[i]));
    }
    return linear_fit(xs, ys);
}

FitResult envelope_loglog_fit(const std::vector<double>& t, const std::vector<double>& v,
                              double t1, double t2, int blocks) {
    if (blocks < 2) throw std::invalid_argument("envelope_loglog_fit: need >= 2 blocks");
    double r = std::pow(t2 / t1, 1.0 / blocks);
    std::vector<double> bt, bv;
    for (int b = 0; b < blocks; ++b) {
        double lo = t1 * std::pow(r, b);
        double hi = (b + 1 == blocks) ? t2 * (1.0 + 1e-12) : t1 * std::pow(r, b + 1);
        double best = 0.0, best_t = 0.0;
        for (size_t i = 0; i < t.size(); ++i)
            if (t[i] >= lo && t[i] < hi && v[i] > best) {
                best = v[i];
                best_t = t[i];
            }
        if (best > 0.0) {
            bt.push_back(best_t);
            bv.push_back(best);
        }
    }
    return loglog_fit(bt, bv, t1 * (1.0 - 1e-12), t2 * (1.0 + 1e-12));
}

} // namespace shearlab
