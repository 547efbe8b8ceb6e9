#include "shearlab/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shearlab {

ChannelField make_initial_data(const ChannelGrid& g, double theta0, double eps) {
    const double lo = 2.0 * theta0, hi = 1.0 - 2.0 * theta0;
    const double w = (hi - lo) / 4.0;
    auto chi = gevrey_cutoff(lo, lo + w, hi - w, hi, 0.5);
    ChannelField f(g, "omega0");
    for (int i = 0; i < g.nx; ++i) {
        double cx = std::cos(g.x(i));
        for (int j = 0; j < g.ny; ++j) f.at(i, j) = eps * cx * chi(g.y_nodes[j]);
    }
    return f;
}

ChannelField make_initial_data(const ChannelGrid& g,
                               const std::function<double(double, double)>& fn) {
    ChannelField f(g, "omega0");
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) f.at(i, j) = fn(g.x(i), g.y_nodes[j]);
    auto mean = x_average(f);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) f.at(i, j) -= mean[j];
    return f;
}

namespace {

// truncate modes above the dealias cutoff (2/3 rule in x)
void dealias_modes(std::vector<ModeFunction>& modes, const ChannelGrid& g) {
    int kc = g.kcut();
    for (auto& m : modes)
        if (m.k > kc)
            std::fill(m.values.begin(), m.values.end(), std::complex<double>(0.0, 0.0));
}

} // namespace

namespace {

template <bool Parallel>
ChannelField rhs_impl(const ChannelField& omega, const ShearProfile& p, bool dealias) {
    const ChannelGrid& g = omega.grid;
    const int nx = g.nx, ny = g.ny;
    Velocity vel = velocity_from_vorticity(omega);

    // physical-space products (divergence form)
    ChannelField P1(g), P2(g); // (b + u^x) omega ; u^y omega
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) {
            double om = omega.at(i, j);
            P1.at(i, j) = (p.b(g.y_nodes[j]) + vel.ux.at(i, j)) * om;
            P2.at(i, j) = vel.uy.at(i, j) * om;
        }

    auto m1 = mode_decompose(P1);
    auto m2 = mode_decompose(P2);
    auto mpsi = mode_decompose(vel.psi);
    if (dealias) {
        dealias_modes(m1, g);
        dealias_modes(m2, g);
        dealias_modes(mpsi, g);
    }
    const double h = g.hy();
    std::vector<ModeFunction> out(m1.size());
    auto compute_mode = [&](int k) {
        ModeFunction r;
        r.k = k;
        r.values.assign(ny, std::complex<double>(0.0, 0.0));
        const std::complex<double> ik(0.0, double(k));
        auto d2 = deriv_y(m2[k].values, h);
        for (int j = 0; j < ny; ++j) {
            std::complex<double> val = -ik * m1[k].values[j] - d2[j];
            if (k != 0) val += p.b2(g.y_nodes[j]) * ik * mpsi[k].values[j];
            r.values[j] = val;
        }
        out[k] = std::move(r);
    };
    if constexpr (Parallel) {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < int(m1.size()); ++k) compute_mode(k);
    } else {
        for (int k = 0; k < int(m1.size()); ++k) compute_mode(k);
    }
    return mode_assemble(g, out, "rhs");
}

} // namespace

ChannelField rhs(const ChannelField& omega, const ShearProfile& p, bool dealias) {
    return rhs_impl<true>(omega, p, dealias);
}

namespace ref {
ChannelField rhs_serial(const ChannelField& omega, const ShearProfile& p, bool dealias) {
    return rhs_impl<false>(omega, p, dealias);
}
} // namespace ref

namespace {

std::vector<double> mean_omega(const ChannelField& om) { return x_average(om); }

void accumulate(std::vector<double>& acc, const std::vector<double>& f0,
                const std::vector<double>& f1, double dt) {
    for (size_t j = 0; j < acc.size(); ++j) acc[j] += 0.5 * dt * (f0[j] + f1[j]);
}

} // namespace

void step_rk4(SimState& s, const ShearProfile& p, double dt, bool dealias) {
    const ChannelGrid& g = s.omega.grid;
    auto om0 = mean_omega(s.omega);
    auto ux0 = mean_ux_from_mean_omega(om0, g.hy());

    ChannelField k1 = rhs(s.omega, p, dealias);
    ChannelField tmp = s.omega;
    for (size_t n = 0; n < tmp.values.size(); ++n)
        tmp.values[n] = s.omega.values[n] + 0.5 * dt * k1.values[n];
    ChannelField k2 = rhs(tmp, p, dealias);
    for (size_t n = 0; n < tmp.values.size(); ++n)
        tmp.values[n] = s.omega.values[n] + 0.5 * dt * k2.values[n];
    ChannelField k3 = rhs(tmp, p, dealias);
    for (size_t n = 0; n < tmp.values.size(); ++n)
        tmp.values[n] = s.omega.values[n] + dt * k3.values[n];
    ChannelField k4 = rhs(tmp, p, dealias);
    for (size_t n = 0; n < s.omega.values.size(); ++n)
        s.omega.values[n] += dt / 6.0 *
                             (k1.values[n] + 2.0 * k2.values[n] + 2.0 * k3.values[n] +
                              k4.values[n]);
    s.t += dt;

    auto om1 = mean_omega(s.omega);
    auto ux1 = mean_ux_from_mean_omega(om1, g.hy());
    accumulate(s.Iomega, om0, om1, dt);
    accumulate(s.Phi, ux0, ux1, dt);
}

void support_extent(const ChannelField& f, double tol, double* supmin, double* supmax) {
    const ChannelGrid& g = f.grid;
    double m = f.max_abs();
    double thr = tol * m;
    int jlo = g.ny, jhi = -1;
    for (int j = 0; j < g.ny; ++j) {
        bool any = false;
        for (int i = 0; i < g.nx; ++i)
            if (std::abs(f.at(i, j)) > thr) {
                any = true;
                break;
            }
        if (any) {
            jlo = std::min(jlo, j);
            jhi = std::max(jhi, j);
        }
    }
    *supmin = (jhi < 0) ? 0.0 : g.y_nodes[jlo];
    *supmax = (jhi < 0) ? 0.0 : g.y_nodes[jhi];
}

namespace {

DiagnosticsRow make_row(const SimState& s, const Velocity& vel) {
    const ChannelGrid& g = s.omega.grid;
    DiagnosticsRow r;
    r.t = s.t;
    support_extent(s.omega, 1e-12, &r.supmin_y, &r.supmax_y);
    auto mean_ux = x_average(vel.ux);
    double uy_inf = 0.0, uxf_inf = 0.0;
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            uy_inf = std::max(uy_inf, std::abs(vel.uy.at(i, j)));
            uxf_inf = std::max(uxf_inf, std::abs(vel.ux.at(i, j) - mean_ux[j]));
        }
    r.uy_inf = uy_inf;
    r.uxfluct_inf = uxf_inf;
    double mass = 0.0, energy = 0.0;
    const double hx = g.hx(), hy = g.hy();
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) {
            double wq = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
            mass += wq * s.omega.at(i, j);
            energy += 0.5 * wq *
                      (vel.ux.at(i, j) * vel.ux.at(i, j) + vel.uy.at(i, j) * vel.uy.at(i, j));
        }
    r.mass = mass * hx * hy;
    r.energy = energy * hx * hy;
    return r;
}

MeanFlowSnapshot make_snapshot(const SimState& s, const Velocity& vel) {
    const ChannelGrid& g = s.omega.grid;
    MeanFlowSnapshot snap;
    snap.t = s.t;
    snap.mean_ux = x_average(vel.ux);
    // <omega d_x psi> by exact x-quadrature (uniform grid mean)
    auto mpsi = mode_decompose(vel.psi);
    ChannelField dxpsi(g);
    std::vector<ModeFunction> dmodes(mpsi.size());
    for (int k = 0; k < int(mpsi.size()); ++k) {
        dmodes[k].k = k;
        dmodes[k].values.resize(g.ny);
        for (int j = 0; j < g.ny; ++j)
            dmodes[k].values[j] = std::complex<double>(0.0, double(k)) * mpsi[k].values[j];
    }
    dxpsi = mode_assemble(g, dmodes);
    ChannelField prod(g);
    for (int i = 0; i < g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) prod.at(i, j) = s.omega.at(i, j) * dxpsi.at(i, j);
    snap.mean_omdxpsi = x_average(prod);
    return snap;
}

} // namespace

RunResult run(const SimConfig& cfg, const RunCallback& cb) {
    const ChannelGrid& g = cfg.grid;
    if (!(cfg.eps >= 0.0)) throw std::invalid_argument("run: eps >= 0");
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("run: dt > 0");
    RunResult res;
    SimState s;
    s.t = 0.0;
    s.omega = (cfg.initial_shape == "cos_bump")
                  ? make_initial_data(g, cfg.profile.theta0, cfg.eps)
                  : throw std::invalid_argument("run: unknown initial_shape");
    s.Phi.assign(g.ny, 0.0);
    s.Iomega.assign(g.ny, 0.0);

    double bmax = 0.0;
    for (double y : g.y_nodes) bmax = std::max(bmax, std::abs(cfg.profile.b(y)));

    auto emit = [&](SimState& st) {
        Velocity vel = velocity_from_vorticity(st.omega);
        DiagnosticsRow row = make_row(st, vel);
        res.rows.push_back(row);
        res.mean_history.push_back(make_snapshot(st, vel));
        if (cb) cb(st, vel, row);
        // CFL audit against the realized velocity
        double uxmax = 0.0, uymax = 0.0;
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j < g.ny; ++j) {
                uxmax = std::max(uxmax, std::abs(vel.ux.at(i, j)));
                uymax = std::max(uymax, std::abs(vel.uy.at(i, j)));
            }
        double lim = std::min(0.5 * g.hx() / std::max(bmax + uxmax, 1e-300),
                              uymax > 0.0 ? 0.5 * g.hy() / uymax : 1e300);
        if (cfg.dt > lim) throw std::runtime_error("run: CFL violation");
    };

    emit(s);
    double next_out = cfg.out_every;
    long nsteps = long(std::llround(cfg.T_end / cfg.dt));
    if (std::abs(nsteps * cfg.dt - cfg.T_end) > 1e-9 * std::max(1.0, cfg.T_end))
        throw std::invalid_argument("run: T_end must be an integer multiple of dt");
    for (long n = 0; n < nsteps; ++n) {
        SimState backup = s;
        step_rk4(s, cfg.profile, cfg.dt, cfg.dealias);
        bool bad = false;
        for (double v : s.omega.values)
            if (!std::isfinite(v)) {
                bad = true;
                break;
            }
        if (bad) {
            res.aborted = true;
            res.abort_reason = "non-finite state";
            res.final_state = std::move(backup);
            return res;
        }
        if (s.t >= next_out - 1e-9) {
            emit(s);
            next_out += cfg.out_every;
        }
    }
    res.final_state = std::move(s);
    return res;
}

MeanFlowReport mean_flow_monitor(const std::vector<MeanFlowSnapshot>& history, double theta0,
                                 const ChannelGrid& g, double eps) {
    MeanFlowReport rep;
    const double h = g.hy();
    double scale = 0.0;
    for (const auto& sn : history)
        for (double v : sn.mean_omdxpsi) scale = std::max(scale, std::abs(v));
    // d/dt <u^x> by centered differences of the history vs <omega d_x psi>
    for (size_t n = 1; n + 1 < history.size(); ++n) {
        double dt2 = history[n + 1].t - history[n - 1].t;
        for (int j = 0; j < g.ny; ++j) {
            double lhs = (history[n + 1].mean_ux[j] - history[n - 1].mean_ux[j]) / dt2;
            double mismatch = std::abs(lhs - history[n].mean_omdxpsi[j]);
            rep.max_rel_mismatch =
                std::max(rep.max_rel_mismatch, mismatch / std::max(scale, 1e-300));
        }
    }
    for (const auto& sn : history)
        for (int j = 0; j < g.ny; ++j) {
            double y = g.y_nodes[j];
            if (y <= theta0 || y >= 1.0 - theta0)
                rep.wall_max = std::max(rep.wall_max, std::abs(sn.mean_ux[j]));
        }
    rep.pass = (rep.max_rel_mismatch <= 0.05) && (rep.wall_max <= 1e-8 * std::max(eps, 1e-300));
    return rep;
}

} // namespace shearlab
