#include "shearlab/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shearlab {

MonotoneCubic MonotoneCubic::fit(std::vector<double> x, std::vector<double> y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("MonotoneCubic: bad sizes");
    std::vector<double> d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        double dx = x[i + 1] - x[i];
        if (dx <= 0.0) throw std::invalid_argument("MonotoneCubic: x not increasing");
        d[i] = (y[i + 1] - y[i]) / dx;
    }
    std::vector<double> m(n);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (size_t i = 1; i + 1 < n; ++i)
        m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
    // Fritsch-Carlson limiter keeps the interpolant monotone on each cell
    for (size_t i = 0; i + 1 < n; ++i) {
        if (d[i] == 0.0) {
            m[i] = m[i + 1] = 0.0;
            continue;
        }
        double a = m[i] / d[i], b = m[i + 1] / d[i];
        double s = a * a + b * b;
        if (s > 9.0) {
            double tau = 3.0 / std::sqrt(s);
            m[i] = tau * a * d[i];
            m[i + 1] = tau * b * d[i];
        }
    }
    MonotoneCubic mc;
    mc.x_ = std::move(x);
    mc.y_ = std::move(y);
    mc.m_ = std::move(m);
    return mc;
}

double MonotoneCubic::operator()(double xq) const {
    const size_t n = x_.size();
    if (xq <= x_.front()) return y_.front() + m_.front() * (xq - x_.front());
    if (xq >= x_.back()) return y_.back() + m_.back() * (xq - x_.back());
    size_t i = size_t(std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin()) - 1;
    i = std::min(i, n - 2);
    double h = x_[i + 1] - x_[i];
    double t = (xq - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

namespace {
inline double cr4(double p0, double p1, double p2, double p3, double t) {
    return p1 + 0.5 * t * (p2 - p0 + t * (2 * p0 - 5 * p1 + 4 * p2 - p3 + t * (3 * (p1 - p2) + p3 - p0)));
}
} // namespace

double catmull_rom_periodic(const std::vector<double>& v, double q) {
    const int n = int(v.size());
    double qf = q - std::floor(q / n) * n;
    int i = int(std::floor(qf));
    double t = qf - i;
    auto at = [&](int j) { return v[size_t(((j % n) + n) % n)]; };
    return cr4(at(i - 1), at(i), at(i + 1), at(i + 2), t);
}

double catmull_rom_clamped(const std::vector<double>& v, double q) {
    const int n = int(v.size());
    double qc = std::clamp(q, 0.0, double(n - 1));
    int i = std::min(int(std::floor(qc)), n - 2);
    double t = qc - i;
    auto at = [&](int j) { return v[size_t(std::clamp(j, 0, n - 1))]; };
    return cr4(at(i - 1), at(i), at(i + 1), at(i + 2), t);
}

} // namespace shearlab
