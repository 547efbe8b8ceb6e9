#include "shearlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shearlab/fft.hpp"
#include "shearlab/interp.hpp"
#include "shearlab/poisson.hpp"

namespace shearlab {

using cplx = std::complex<double>;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Catmull-Rom kernel weights for fractional offset q in [0,1)
inline void cr_weights(double q, double w[4]) {
    double q2 = q * q, q3 = q2 * q;
    w[0] = 0.5 * (-q3 + 2.0 * q2 - q);
    w[1] = 0.5 * (3.0 * q3 - 5.0 * q2 + 2.0);
    w[2] = 0.5 * (-3.0 * q3 + 4.0 * q2 + q);
    w[3] = 0.5 * (q3 - q2);
}

// clamped sample of a 1D array by fractional index
double sample_clamped(const std::vector<double>& f, double q) {
    return catmull_rom_clamped(f, q);
}

} // namespace

double interp_field(const ChannelField& f, double x, double y) {
    const ChannelGrid& g = f.grid;
    const int nx = g.nx, ny = g.ny;
    double qx = x / g.hx();
    qx -= std::floor(qx / nx) * nx; // wrap into [0, nx)
    int i0 = int(std::floor(qx));
    double fx = qx - i0;
    double qy = y / g.hy();
    qy = std::clamp(qy, 0.0, double(ny - 1));
    int j0 = int(std::floor(qy));
    if (j0 > ny - 2) j0 = ny - 2;
    double fy = qy - j0;
    double wx[4], wy[4];
    cr_weights(fx, wx);
    cr_weights(fy, wy);
    double out = 0.0;
    for (int a = 0; a < 4; ++a) {
        int i = (i0 - 1 + a + 2 * nx) % nx;
        double row = 0.0;
        for (int b = 0; b < 4; ++b) {
            int j = std::clamp(j0 - 1 + b, 0, ny - 1);
            row += wy[b] * f.at(i, j);
        }
        out += wx[a] * row;
    }
    return out;
}

CoordinateMap build_coordinates(const SimState& s, const ShearProfile& p) {
    const ChannelGrid& g = s.omega.grid;
    const int ny = g.ny;
    const double h = g.hy();
    const double t = s.t;
    CoordinateMap m;
    m.t = t;

    auto mo = x_average(s.omega);
    auto mux = mean_ux_from_mean_omega(mo, h);

    m.v_of_y.resize(ny);
    for (int j = 0; j < ny; ++j)
        m.v_of_y[j] = p.b(g.y_nodes[j]) + (t > 0.0 ? s.Phi[j] / t : 0.0);
    for (int j = 0; j + 1 < ny; ++j)
        if (!(m.v_of_y[j + 1] > m.v_of_y[j]))
            throw std::runtime_error("build_coordinates: v(t,.) not strictly increasing");

    const double v0 = p.b(0.0), v1 = p.b(1.0);
    m.v_grid.resize(ny);
    for (int j = 0; j < ny; ++j) m.v_grid[j] = v0 + (v1 - v0) * j / double(ny - 1);

    auto Yfit = MonotoneCubic::fit(m.v_of_y, std::vector<double>(g.y_nodes));
    m.Y.resize(ny);
    for (int j = 0; j < ny; ++j) m.Y[j] = std::clamp(Yfit(m.v_grid[j]), 0.0, 1.0);

    auto dIom = deriv_y(s.Iomega, h);
    m.Vp.resize(ny);
    m.Vdot.resize(ny);
    m.Bp.resize(ny);
    m.Bpp.resize(ny);
    m.Bp0.resize(ny);
    m.Bpp0.resize(ny);
    m.Favg.resize(ny);
    m.H.resize(ny);
    m.Vpp_direct.resize(ny);
    for (int j = 0; j < ny; ++j) {
        double y = m.Y[j];
        double q = y / h; // fractional y index
        double Iom = sample_clamped(s.Iomega, q);
        double Phi = sample_clamped(s.Phi, q);
        double uxm = sample_clamped(mux, q);
        double omm = sample_clamped(mo, q);
        m.Bp[j] = p.b1(y);
        m.Bpp[j] = p.b2(y);
        double yb = p.binv(m.v_grid[j]);
        m.Bp0[j] = p.b1(yb);
        m.Bpp0[j] = p.b2(yb);
        if (t > 0.0) {
            m.Vp[j] = p.b1(y) - Iom / t;
            m.Vdot[j] = (uxm - Phi / t) / t;
            m.H[j] = Iom / t - omm; // = B' - V' - <F>, exact combination
            m.Vpp_direct[j] = p.b2(y) - sample_clamped(dIom, q) / t;
        } else {
            m.Vp[j] = p.b1(y);
            m.Vdot[j] = 0.0;
            m.H[j] = 0.0;
            m.Vpp_direct[j] = p.b2(y);
        }
        m.Favg[j] = omm;
    }
    const double dv = (v1 - v0) / (ny - 1);
    auto dVdot = deriv_y(m.Vdot, dv);
    auto dVp = deriv_y(m.Vp, dv);
    m.Vpp_product.resize(ny);
    double scale = 1.0;
    for (int j = 0; j < ny; ++j) {
        scale = std::max({scale, std::abs(m.Bp[j]), std::abs(m.Vp[j])});
        m.Vpp_product[j] = m.Vp[j] * dVp[j];
    }
    double rid = 0.0, rvpp = 0.0;
    for (int j = 0; j < ny; ++j) {
        if (t > 0.0) {
            double prod = t * m.Vp[j] * dVdot[j];
            rid = std::max(rid, std::abs(prod - m.H[j]));
        }
        rvpp = std::max(rvpp, std::abs(m.Vpp_direct[j] - m.Vpp_product[j]));
    }
    m.identity_residual = rid / scale;
    m.vpp_residual = rvpp / scale;
    return m;
}

ProfileState pull_back_profile(const ChannelField& omega, const ChannelField& psi,
                               const CoordinateMap& map, const ShearProfile&) {
    const ChannelGrid& g = omega.grid;
    ProfileState ps;
    ps.t = map.t;
    ps.nz = g.nx;
    ps.nv = int(map.v_grid.size());
    ChannelField F(g, "F"), Ph(g, "phi");
    const double t = map.t;
    for (int i = 0; i < g.nx; ++i) {
        double z = g.x(i);
        for (int j = 0; j < ps.nv; ++j) {
            double x = z + t * map.v_grid[j];
            double y = map.Y[j];
            F.at(i, j) = interp_field(omega, x, y);
            Ph.at(i, j) = interp_field(psi, x, y);
        }
    }
    ps.F = mode_decompose(F);
    ps.phi = mode_decompose(Ph);
    return ps;
}

std::vector<ModeFunction> solve_phi_prime(const std::vector<ModeFunction>& F,
                                          const std::vector<double>& v_grid,
                                          const ShearProfile& p, double t) {
    const int nv = int(v_grid.size());
    const double dv = (v_grid.back() - v_grid.front()) / (nv - 1);
    std::vector<double> yb(nv), invBp0(nv), wq(nv, dv);
    wq.front() *= 0.5;
    wq.back() *= 0.5;
    for (int j = 0; j < nv; ++j) {
        yb[j] = p.binv(v_grid[j]);
        invBp0[j] = 1.0 / p.b1(yb[j]);
    }
    std::vector<ModeFunction> out(F.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < int(F.size()); ++k) {
        ModeFunction r;
        r.k = k;
        r.values.assign(nv, cplx(0.0, 0.0));
        // separable phase: e^{i k t (v - w)} = e^{i k t v} e^{-i k t w}
        std::vector<cplx> src(nv);
        for (int j = 0; j < nv; ++j)
            src[j] = wq[j] * invBp0[j] * F[k].values[j] *
                     std::exp(cplx(0.0, -double(k) * t * v_grid[j]));
        for (int i = 0; i < nv; ++i) {
            cplx acc(0.0, 0.0);
            for (int j = 0; j < nv; ++j) acc += green_function(k, yb[i], yb[j]) * src[j];
            r.values[i] = -std::exp(cplx(0.0, double(k) * t * v_grid[i])) * acc;
        }
        out[k] = std::move(r);
    }
    return out;
}

void FStarAccumulator::add(const std::vector<ModeFunction>& phi_prime,
                           const std::vector<double>& v_grid, double t) {
    const int nv = int(v_grid.size());
    std::vector<ModeFunction> dz(phi_prime.size());
    for (int k = 0; k < int(phi_prime.size()); ++k) {
        dz[k].k = k;
        dz[k].values.resize(nv);
        for (int j = 0; j < nv; ++j)
            dz[k].values[j] = cplx(0.0, double(k)) * phi_prime[k].values[j];
    }
    if (!have_last_) {
        acc_.resize(dz.size());
        for (int k = 0; k < int(dz.size()); ++k) {
            acc_[k].k = k;
            acc_[k].values.assign(nv, cplx(0.0, 0.0));
        }
    } else {
        double dt = t - last_t_;
        for (int k = 0; k < int(dz.size()); ++k)
            for (int j = 0; j < nv; ++j)
                acc_[k].values[j] += 0.5 * dt * (last_dzphi_[k].values[j] + dz[k].values[j]);
    }
    last_dzphi_ = std::move(dz);
    last_t_ = t;
    have_last_ = true;
}

std::vector<ModeFunction> FStarAccumulator::f_star(const std::vector<ModeFunction>& F,
                                                   const std::vector<double>& Bpp0) const {
    std::vector<ModeFunction> out(F.size());
    for (int k = 0; k < int(F.size()); ++k) {
        out[k].k = k;
        out[k].values = F[k].values;
        if (!acc_.empty())
            for (size_t j = 0; j < out[k].values.size(); ++j)
                out[k].values[j] -= Bpp0[j] * acc_[k].values[j];
    }
    return out;
}

double psi_cutoff(const ShearProfile& p, double v) {
    double t0 = p.theta0;
    auto psi = gevrey_cutoff(p.b(t0 / 4.0), p.b(t0 / 3.0), p.b(1.0 - t0 / 3.0),
                             p.b(1.0 - t0 / 4.0), 0.75);
    return psi(v);
}

std::vector<ModeFunction> theta_field(const std::vector<ModeFunction>& phi,
                                      const std::vector<double>& v_grid, const ShearProfile& p,
                                      double t) {
    const int nv = int(v_grid.size());
    const double dv = (v_grid.back() - v_grid.front()) / (nv - 1);
    std::vector<double> Psi(nv);
    for (int j = 0; j < nv; ++j) Psi[j] = psi_cutoff(p, v_grid[j]);
    std::vector<ModeFunction> out(phi.size());
    for (int k = 0; k < int(phi.size()); ++k) {
        out[k].k = k;
        std::vector<cplx> q(nv);
        for (int j = 0; j < nv; ++j) q[j] = Psi[j] * phi[k].values[j];
        auto q1 = deriv_y(q, dv);
        auto q2 = deriv_y(q1, dv);
        out[k].values.resize(nv);
        const double kk = double(k);
        const cplx i2kt(0.0, 2.0 * kk * t);
        for (int j = 0; j < nv; ++j)
            out[k].values[j] = q2[j] - i2kt * q1[j] - (kk * kk + kk * kk * t * t) * q[j];
    }
    return out;
}

namespace {

struct SpectralSums {
    double E = 0.0;      // A^2-weighted
    double D = 0.0;      // |Adot| A-weighted
    double total = 0.0;  // A^2-weighted (for tail fraction)
    double tail = 0.0;
};

// DFT of the zero-extended values over the v box; returns coefficients and
// frequencies xi_m = pi * m~ / Lv
void v_spectrum(const std::vector<cplx>& vals, double Lv, std::vector<cplx>& coef,
                std::vector<double>& xi) {
    const int nv = int(vals.size());
    const int N = 2 * (nv - 1);
    coef.assign(N, cplx(0.0, 0.0));
    for (int j = 0; j < nv; ++j) coef[j] = vals[j];
    fft::dft_many(coef.data(), N, 1, 1, 1, -1);
    xi.resize(N);
    for (int m = 0; m < N; ++m) {
        int mt = (m <= N / 2) ? m : m - N;
        coef[m] /= double(N);
        xi[m] = kPi * mt / Lv;
    }
}

// extra(k, xi) multiplies A^2; kind selects the A weight family
template <typename Extra>
SpectralSums weighted_sums_2d(const std::vector<ModeFunction>& modes, double Lv, double t,
                              const WeightEvaluator& W, WKind kind, bool skip_k0, Extra extra) {
    SpectralSums s;
    const double hdt = 1e-3 * std::sqrt(1.0 + t * t);
    std::vector<cplx> coef;
    std::vector<double> xi;
    for (const auto& m : modes) {
        if (skip_k0 && m.k == 0) continue;
        double mult = (m.k == 0) ? 1.0 : 2.0;
        v_spectrum(m.values, Lv, coef, xi);
        const int N = int(coef.size());
        const int nz2 = int(modes.size()) - 1;
        for (int i = 0; i < N; ++i) {
            double p2 = std::norm(coef[i]);
            if (p2 == 0.0) continue;
            double A = W.A(kind, m.k, t, xi[i]);
            double Ap = W.A(kind, m.k, t + hdt, xi[i]);
            double Am = W.A(kind, m.k, std::max(t - hdt, 0.0), xi[i]);
            double Adot = std::abs(Ap - Am) / (2.0 * hdt);
            double ex = extra(m.k, xi[i]);
            double measure = 2.0 * kPi * mult * 2.0 * Lv;
            double term = measure * A * A * ex * p2;
            s.E += term;
            s.D += measure * Adot * A * ex * p2;
            s.total += term;
            int mt = (i <= N / 2) ? i : i - N;
            if (std::abs(mt) >= int(0.9 * (N / 2)) ||
                (nz2 > 0 && std::abs(m.k) >= int(0.9 * nz2)))
                s.tail += term;
        }
    }
    return s;
}

template <typename Extra>
SpectralSums weighted_sums_1d(const std::vector<double>& vals, double Lv, double t,
                              const WeightEvaluator& W, WKind kind, Extra extra) {
    std::vector<cplx> cv(vals.begin(), vals.end());
    const double hdt = 1e-3 * std::sqrt(1.0 + t * t);
    std::vector<cplx> coef;
    std::vector<double> xi;
    v_spectrum(cv, Lv, coef, xi);
    SpectralSums s;
    const int N = int(coef.size());
    for (int i = 0; i < N; ++i) {
        double p2 = std::norm(coef[i]);
        if (p2 == 0.0) continue;
        double A = W.A(kind, 0, t, xi[i]);
        double Ap = W.A(kind, 0, t + hdt, xi[i]);
        double Am = W.A(kind, 0, std::max(t - hdt, 0.0), xi[i]);
        double Adot = std::abs(Ap - Am) / (2.0 * hdt);
        double ex = extra(0, xi[i]);
        double measure = 2.0 * Lv;
        double term = measure * A * A * ex * p2;
        s.E += term;
        s.D += measure * Adot * A * ex * p2;
        s.total += term;
        int mt = (i <= N / 2) ? i : i - N;
        if (std::abs(mt) >= int(0.9 * (N / 2))) s.tail += term;
    }
    return s;
}

} // namespace

const char* EnergyReport::name(int i) {
    static const char* names[9] = {"F",  "Fstar",  "FminusFstar", "Theta", "ThetaStar",
                                   "Vp", "Bp", "Bpp", "H"};
    return names[i];
}

EnergyReport energies(const ProfileState& ps, const CoordinateMap& map,
                      const WeightEvaluator& W, double Kconst) {
    EnergyReport rep;
    rep.t = ps.t;
    const auto& prm = W.params();
    rep.delta0 = prm.delta0;
    rep.delta = prm.delta;
    rep.K = Kconst;
    const double Lv = map.v_grid.back() - map.v_grid.front();
    const double t = ps.t;
    const double jt = std::sqrt(1.0 + t * t);
    auto one = [](int, double) { return 1.0; };
    auto enh = [jt](int k, double xi) {
        return 1.0 + std::sqrt(1.0 + double(k) * k + xi * xi) / jt;
    };
    auto ell = [jt](int k, double xi) {
        double kt2 = double(k) * k * jt * jt;
        return kt2 / (xi * xi + kt2);
    };
    auto hwt = [jt](int, double xi) {
        return std::pow(jt / std::sqrt(1.0 + xi * xi), 1.5);
    };

    std::vector<ModeFunction> diff(ps.F.size());
    for (int k = 0; k < int(ps.F.size()); ++k) {
        diff[k].k = k;
        diff[k].values.resize(ps.F[k].values.size());
        for (size_t j = 0; j < diff[k].values.size(); ++j)
            diff[k].values[j] = ps.F[k].values[j] - ps.F_star[k].values[j];
    }
    std::vector<double> vps(map.Vp.size()), bps(map.Vp.size()), bpps(map.Vp.size());
    for (size_t j = 0; j < map.Vp.size(); ++j) {
        vps[j] = map.Vp[j] - map.Bp0[j];
        bps[j] = map.Bp[j] - map.Bp0[j];
        bpps[j] = map.Bpp[j] - map.Bpp0[j];
    }

    SpectralSums sums[9];
    sums[0] = weighted_sums_2d(ps.F, Lv, t, W, WKind::K, false, one);
    sums[1] = weighted_sums_2d(ps.F_star, Lv, t, W, WKind::K, false, one);
    sums[2] = weighted_sums_2d(diff, Lv, t, W, WKind::K, true, enh);
    sums[3] = weighted_sums_2d(ps.Theta, Lv, t, W, WKind::K, true, ell);
    sums[4] = weighted_sums_2d(ps.Theta_star, Lv, t, W, WKind::K, true, ell);
    sums[5] = weighted_sums_1d(vps, Lv, t, W, WKind::R, one);
    sums[6] = weighted_sums_1d(bps, Lv, t, W, WKind::R, one);
    sums[7] = weighted_sums_1d(bpps, Lv, t, W, WKind::R, one);
    sums[8] = weighted_sums_1d(map.H, Lv, t, W, WKind::NR, hwt);
    sums[8].E *= Kconst * Kconst;
    sums[8].D *= Kconst * Kconst;
    sums[8].total *= Kconst * Kconst;
    sums[8].tail *= Kconst * Kconst;

    double max_tail = 0.0;
    for (int i = 0; i < 9; ++i) {
        rep.E[i] = sums[i].E;
        rep.D[i] = sums[i].D;
        if (sums[i].total > 0.0) max_tail = std::max(max_tail, sums[i].tail / sums[i].total);
    }
    rep.tail_fraction = max_tail;
    rep.resolved = max_tail <= 1e-6;
    return rep;
}

void EnergyIntegrator::accumulate(EnergyReport& rep) {
    if (have_last_ && rep.t > 1.0) {
        double t0 = std::max(last_t_, 1.0);
        if (rep.t > t0) {
            // linear interpolation of D at t0 if the previous report was before t=1
            for (int i = 0; i < EnergyReport::n_energies; ++i) {
                double d0 = last_D_[i];
                if (last_t_ < 1.0 && rep.t > last_t_)
                    d0 = last_D_[i] +
                         (rep.D[i] - last_D_[i]) * (1.0 - last_t_) / (rep.t - last_t_);
                runningB_[i] += 0.5 * (rep.t - t0) * (d0 + rep.D[i]);
            }
        }
    }
    for (int i = 0; i < EnergyReport::n_energies; ++i) {
        rep.B[i] = runningB_[i];
        last_D_[i] = rep.D[i];
    }
    last_t_ = rep.t;
    have_last_ = true;
}

std::vector<BootstrapVerdict> bootstrap_monitor(const std::vector<EnergyReport>& series,
                                                double eps) {
    double eps1 = std::pow(eps, 2.0 / 3.0);
    std::vector<BootstrapVerdict> out;
    for (const auto& r : series) {
        BootstrapVerdict v;
        v.t = r.t;
        v.budget = eps1 * eps1;
        for (int i = 0; i < EnergyReport::n_energies; ++i) v.total += r.E[i] + r.B[i];
        v.margin = v.budget - v.total;
        v.pass = v.total <= v.budget;
        out.push_back(v);
    }
    return out;
}

} // namespace shearlab
