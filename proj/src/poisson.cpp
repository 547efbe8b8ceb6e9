#include "shearlab/poisson.hpp"

#include <cmath>
#include <stdexcept>

namespace shearlab {

double green_function(int k, double y, double z) {
    if (y < 0.0 || y > 1.0 || z < 0.0 || z > 1.0)
        throw std::invalid_argument("green_function: y,z in [0,1]");
    double lo = std::min(y, z), hi = std::max(y, z);
    if (k == 0) return (1.0 - hi) * lo;
    double a = std::abs(double(k));
    // sinh(a(1-hi)) sinh(a lo) / (a sinh a)
    //   = e^{-a(hi-lo)} (1-e^{-2a(1-hi)}) (1-e^{-2a lo}) / (2a (1-e^{-2a}))
    double num = std::exp(-a * (hi - lo)) * (1.0 - std::exp(-2.0 * a * (1.0 - hi))) *
                 (1.0 - std::exp(-2.0 * a * lo));
    return num / (2.0 * a * (1.0 - std::exp(-2.0 * a)));
}

ModeFunction poisson_mode_solve(const ChannelGrid& g, const ModeFunction& f) {
    const int n = g.ny;
    if (n < 3) throw std::runtime_error("poisson_mode_solve: singular (ny < 3)");
    if (int(f.values.size()) != n) throw std::invalid_argument("poisson_mode_solve: size");
    const double h = g.hy();
    const double k2 = double(f.k) * double(f.k);
    // rows 1..n-2: (phi[j-1] - 2 phi[j] + phi[j+1])/h^2 - k^2 phi[j] = f[j]
    ModeFunction phi;
    phi.k = f.k;
    phi.values.assign(n, {0.0, 0.0});
    // Thomas algorithm on the interior
    const double a = 1.0 / (h * h);
    const double b = -2.0 / (h * h) - k2;
    std::vector<double> cp(n, 0.0);
    std::vector<std::complex<double>> dp(n, {0.0, 0.0});
    cp[1] = a / b;
    dp[1] = f.values[1] / b;
    for (int j = 2; j <= n - 2; ++j) {
        double m = b - a * cp[j - 1];
        cp[j] = a / m;
        dp[j] = (f.values[j] - a * dp[j - 1]) / m;
    }
    phi.values[n - 2] = dp[n - 2];
    for (int j = n - 3; j >= 1; --j) phi.values[j] = dp[j] - cp[j] * phi.values[j + 1];
    return phi;
}

std::vector<double> mean_ux_from_mean_omega(const std::vector<double>& om_avg, double h) {
    const int n = int(om_avg.size());
    std::vector<double> u(n, 0.0);
    for (int j = 1; j < n; ++j)
        u[j] = u[j - 1] - 0.5 * h * (om_avg[j - 1] + om_avg[j]);
    double mean = trapz(u, h);
    for (double& v : u) v -= mean;
    return u;
}

Velocity velocity_from_vorticity(const ChannelField& omega) {
    const ChannelGrid& g = omega.grid;
    const int ny = g.ny, kmax = g.kmax();
    auto om_modes = mode_decompose(omega);

    std::vector<ModeFunction> psi_modes(kmax + 1), ux_modes(kmax + 1), uy_modes(kmax + 1);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k <= kmax; ++k) {
        psi_modes[k] = poisson_mode_solve(g, om_modes[k]);
        ux_modes[k].k = k;
        uy_modes[k].k = k;
        uy_modes[k].values.assign(ny, {0.0, 0.0});
        if (k == 0) {
            std::vector<double> om0(ny);
            for (int j = 0; j < ny; ++j) om0[j] = om_modes[0].values[j].real();
            auto u0 = mean_ux_from_mean_omega(om0, g.hy());
            ux_modes[0].values.assign(ny, {0.0, 0.0});
            for (int j = 0; j < ny; ++j) ux_modes[0].values[j] = u0[j];
        } else {
            auto d = deriv_y(psi_modes[k].values, g.hy());
            ux_modes[k].values.resize(ny);
            for (int j = 0; j < ny; ++j) {
                ux_modes[k].values[j] = -d[j];
                uy_modes[k].values[j] = std::complex<double>(0.0, double(k)) * psi_modes[k].values[j];
            }
        }
    }
    Velocity vel{mode_assemble(g, psi_modes, "psi"), mode_assemble(g, ux_modes, "ux"),
                 mode_assemble(g, uy_modes, "uy")};
    return vel;
}

namespace ref {

ModeFunction poisson_green_quadrature(const ChannelGrid& g, const ModeFunction& f) {
    const int n = g.ny;
    const double h = g.hy();
    ModeFunction phi;
    phi.k = f.k;
    phi.values.assign(n, {0.0, 0.0});
    for (int i = 0; i < n; ++i) {
        std::complex<double> s{0.0, 0.0};
        for (int j = 0; j < n; ++j) {
            double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
            s += green_function(f.k, g.y_nodes[i], g.y_nodes[j]) * f.values[j] * w;
        }
        phi.values[i] = -s;
    }
    return phi;
}

} // namespace ref

} // namespace shearlab
