#include "shearlab/linear_flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Dense>

#include "shearlab/poisson.hpp"

namespace shearlab {

double l2_norm(const std::vector<cplx>& f, double h) {
    double s = 0.0;
    const int n = int(f.size());
    for (int j = 0; j < n; ++j) {
        double w = (j == 0 || j == n - 1) ? 0.5 * h : h;
        s += w * std::norm(f[j]);
    }
    return std::sqrt(s);
}

namespace {

std::vector<cplx> initial_mode(const ShearProfile& p, int k, const std::function<cplx(double)>& X,
                               double a, const ChannelGrid& g) {
    std::vector<cplx> v(g.ny);
    for (int j = 0; j < g.ny; ++j) {
        double b = p.b(g.y_nodes[j]);
        v[j] = X(b) * std::exp(cplx(0.0, -double(k) * a * b));
    }
    return v;
}

void check_support(const ShearProfile& p, const std::function<cplx(double)>& X) {
    // X must vanish outside [b(theta0), b(1-theta0)]
    double lo = p.b(p.theta0), hi = p.b(1.0 - p.theta0);
    for (int i = 0; i <= 64; ++i) {
        double u = double(i) / 64.0;
        double vlo = p.b(0.0) + u * (lo - p.b(0.0));
        double vhi = hi + u * (p.b(1.0) - hi);
        if (std::abs(X(vlo)) > 1e-12 && vlo < lo - 1e-12)
            throw std::invalid_argument("evolve_linear: X not supported in [b(t0), b(1-t0)]");
        if (std::abs(X(vhi)) > 1e-12 && vhi > hi + 1e-12)
            throw std::invalid_argument("evolve_linear: X not supported in [b(t0), b(1-t0)]");
    }
}

LinearSample make_sample(const ChannelGrid& g, int k, double t, const Eigen::VectorXcd& gv) {
    LinearSample s;
    s.t = t;
    s.g.assign(gv.data(), gv.data() + gv.size());
    ModeFunction gm{k, s.g};
    ModeFunction phim = poisson_mode_solve(g, gm);
    s.phi = phim.values;
    const double h = g.hy();
    s.l2_g = l2_norm(s.g, h);
    s.l2_phi = l2_norm(s.phi, h);
    std::vector<cplx> dphi(g.ny, cplx(0, 0));
    for (int j = 1; j + 1 < g.ny; ++j) dphi[j] = (s.phi[j + 1] - s.phi[j - 1]) / (2.0 * h);
    dphi[0] = (s.phi[1] - s.phi[0]) / h;
    dphi[g.ny - 1] = (s.phi[g.ny - 1] - s.phi[g.ny - 2]) / h;
    s.l2_dyphi = l2_norm(dphi, h);
    return s;
}

} // namespace

std::vector<LinearSample> evolve_linear(const ShearProfile& p, int k,
                                        const std::function<cplx(double)>& X, double a,
                                        double T_end, double dt,
                                        const std::vector<double>& out_times,
                                        const ChannelGrid& g) {
    if (k == 0) throw std::invalid_argument("evolve_linear: k must be nonzero");
    check_support(p, X);
    double bmax = 0.0;
    for (double y : g.y_nodes) bmax = std::max(bmax, std::abs(p.b(y)));
    if (dt > 0.5 / (std::abs(double(k)) * bmax))
        std::fprintf(stderr, "evolve_linear: warning: dt=%g exceeds 0.5/(|k| max|b|)=%g\n", dt,
                     0.5 / (std::abs(double(k)) * bmax));

    LkOperator L = build_Lk(p, k, g);
    Eigen::MatrixXcd M = cplx(0.0, -double(k)) * L.matrix; // d_t g = M g
    Eigen::VectorXcd gv =
        Eigen::Map<const Eigen::VectorXcd>(initial_mode(p, k, X, a, g).data(), g.ny);

    std::vector<double> outs = out_times;
    std::sort(outs.begin(), outs.end());
    std::vector<LinearSample> series;
    size_t oi = 0;
    double t = 0.0;
    const double h = g.hy();
    // support-leakage monitor window: [theta0/2, 1-theta0/2] plus a 2-cell halo
    int jlo = std::max(0, int(std::floor((p.theta0 / 2.0) / h)) - 2);
    int jhi = std::min(g.ny - 1, int(std::ceil((1.0 - p.theta0 / 2.0) / h)) + 2);
    auto leak_check = [&] {
        double inside = 0.0, outside = 0.0;
        for (int j = 0; j < g.ny; ++j) {
            double m = std::abs(gv[j]);
            if (j < jlo || j > jhi) outside = std::max(outside, m);
            else inside = std::max(inside, m);
        }
        if (outside > 1e-8 * std::max(inside, 1e-300))
            throw std::runtime_error("evolve_linear: support leakage beyond [t0/2, 1-t0/2]");
    };
    auto emit_due = [&](double tnow) {
        while (oi < outs.size() && tnow >= outs[oi] - 1e-12) {
            series.push_back(make_sample(g, k, tnow, gv));
            ++oi;
        }
    };
    emit_due(0.0);
    Eigen::VectorXcd k1(g.ny), k2(g.ny), k3(g.ny), k4(g.ny);
    long nsteps = long(std::ceil(T_end / dt - 1e-12));
    for (long s = 0; s < nsteps; ++s) {
        double step = std::min(dt, T_end - t);
        k1 = M * gv;
        k2 = M * (gv + 0.5 * step * k1);
        k3 = M * (gv + 0.5 * step * k2);
        k4 = M * (gv + step * k3);
        gv += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += step;
        if (!gv.allFinite()) throw std::runtime_error("evolve_linear: non-finite state");
        if (s % 50 == 0) leak_check();
        emit_due(t);
    }
    leak_check();
    emit_due(T_end + 1e-9);
    return series;
}

std::vector<cplx> free_transport_mode(const ShearProfile& p, int k,
                                      const std::function<cplx(double)>& X, double a, double t,
                                      const ChannelGrid& g) {
    std::vector<cplx> v(g.ny);
    for (int j = 0; j < g.ny; ++j) {
        double b = p.b(g.y_nodes[j]);
        v[j] = X(b) * std::exp(cplx(0.0, -double(k) * b * (t + a)));
    }
    return v;
}

DampingFit damping_fit(const std::vector<LinearSample>& series, int k, double t1, double t2) {
    std::vector<double> ts, uy, ux;
    for (const auto& s : series) {
        ts.push_back(s.t);
        uy.push_back(std::abs(double(k)) * s.l2_phi);
        ux.push_back(s.l2_dyphi);
    }
    DampingFit f;
    // the decay statements are sup bounds; fit the oscillation envelope
    f.uy_proxy = envelope_loglog_fit(ts, uy, t1, t2);
    f.ux_fluct = envelope_loglog_fit(ts, ux, t1, t2);
    return f;
}

namespace {

// shared pieces of the Fredholm solve, reusable across y0 values
struct FredholmWorkspace {
    Eigen::MatrixXd G;       // Green kernel G_k(y_i, y_j)
    std::vector<double> b2;  // b''(y_j)
    std::vector<cplx> Xv;    // X(b(y_j)) e^{-i k a b(y_j)}
};

FredholmWorkspace make_workspace(const ShearProfile& p, int k,
                                 const std::function<cplx(double)>& X, double a,
                                 const ChannelGrid& g) {
    FredholmWorkspace w;
    const int ny = g.ny;
    w.G.resize(ny, ny);
    for (int i = 0; i < ny; ++i)
        for (int j = 0; j < ny; ++j) w.G(i, j) = green_function(k, g.y_nodes[i], g.y_nodes[j]);
    w.b2.resize(ny);
    w.Xv.resize(ny);
    for (int j = 0; j < ny; ++j) {
        double b = p.b(g.y_nodes[j]);
        w.b2[j] = p.b2(g.y_nodes[j]);
        w.Xv[j] = X(b) * std::exp(cplx(0.0, -double(k) * a * b));
    }
    return w;
}

// solve (I + K) psi = h for one (y0, signed eps); returns psi and residual
std::vector<cplx> fredholm_solve(const FredholmWorkspace& w, const ShearProfile& p,
                                 const ChannelGrid& g, double y0, double seps,
                                 double* rel_residual) {
    const int ny = g.ny;
    auto sw = singular_hat_weights(p, g.y_nodes, y0, seps);
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(ny, ny);
    Eigen::VectorXcd h(ny);
    for (int i = 0; i < ny; ++i) {
        cplx hv(0.0, 0.0);
        for (int j = 0; j < ny; ++j) {
            cplx kern = w.G(i, j) * sw[j];
            A(i, j) += kern * w.b2[j];
            hv += kern * w.Xv[j];
        }
        h(i) = hv;
    }
    Eigen::VectorXcd psi = A.partialPivLu().solve(h);
    if (rel_residual) {
        double num = (A * psi - h).norm();
        double den = std::max(h.norm(), 1e-300);
        *rel_residual = num / den;
    }
    return std::vector<cplx>(psi.data(), psi.data() + ny);
}

} // namespace

GeneralizedEigenfunction generalized_eigenfunction(const ShearProfile& p, int k, double y0,
                                                   double eps, int iota,
                                                   const std::function<cplx(double)>& X, double a,
                                                   const ChannelGrid& g) {
    if (k == 0) throw std::invalid_argument("generalized_eigenfunction: k must be nonzero");
    if (eps == 0.0 || std::abs(eps) > 0.25)
        throw std::invalid_argument("generalized_eigenfunction: eps in [-1/4,1/4] \\ {0}");
    if (iota != 1 && iota != -1)
        throw std::invalid_argument("generalized_eigenfunction: iota in {+1,-1}");
    auto w = make_workspace(p, k, X, a, g);
    GeneralizedEigenfunction ge;
    ge.k = k;
    ge.y0 = y0;
    ge.eps = eps;
    ge.iota = iota;
    ge.psi = fredholm_solve(w, p, g, y0, double(iota) * eps, &ge.fredholm_residual);
    return ge;
}

double eigenfunction_ode_residual(const ShearProfile& p, const GeneralizedEigenfunction& ge,
                                  const std::function<cplx(double)>& X, double a,
                                  const ChannelGrid& g) {
    const int ny = g.ny;
    const double h = g.hy();
    const double by0 = p.b(ge.y0);
    const cplx ieps(0.0, double(ge.iota) * ge.eps);
    double num = 0.0, den = 0.0;
    for (int j = 1; j + 1 < ny; ++j) {
        double y = g.y_nodes[j];
        double b = p.b(y);
        cplx d2 = (ge.psi[j + 1] - 2.0 * ge.psi[j] + ge.psi[j - 1]) / (h * h);
        cplx denom = b - by0 + ieps;
        cplx Xs = X(b) * std::exp(cplx(0.0, -double(ge.k) * a * b));
        cplx res = d2 - double(ge.k) * ge.k * ge.psi[j] - p.b2(y) * ge.psi[j] / denom +
                   Xs / denom;
        num += std::norm(res);
        den += std::norm(Xs / denom) + std::norm(double(ge.k) * ge.k * ge.psi[j]);
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

std::vector<cplx> spectral_representation(const ShearProfile& p, int k,
                                          const std::function<cplx(double)>& X, double a, double t,
                                          double eps, int ny0, const ChannelGrid& g) {
    if (eps <= 0.0) throw std::invalid_argument("spectral_representation: eps > 0");
    if (ny0 < 256) throw std::invalid_argument("spectral_representation: ny0 >= 256");
    auto w = make_workspace(p, k, X, a, g);
    const int ny = g.ny;
    std::vector<cplx> phi(ny, cplx(0.0, 0.0));
    const double h0 = 1.0 / (ny0 - 1);
    const cplx pref = cplx(0.0, 1.0) / (2.0 * 3.14159265358979323846); // -1/(2 pi i)
    std::vector<std::vector<cplx>> contrib(ny0);
#pragma omp parallel for schedule(dynamic)
    for (int m = 0; m < ny0; ++m) {
        double y0 = m * h0;
        auto pm = fredholm_solve(w, p, g, y0, -eps, nullptr);
        auto pp = fredholm_solve(w, p, g, y0, +eps, nullptr);
        double wq = (m == 0 || m == ny0 - 1) ? 0.5 * h0 : h0;
        cplx factor = pref * wq * p.b1(y0) *
                      std::exp(cplx(0.0, -double(k) * p.b(y0) * t));
        std::vector<cplx> c(ny);
        for (int i = 0; i < ny; ++i) c[i] = factor * (pm[i] - pp[i]);
        contrib[m] = std::move(c);
    }
    for (int m = 0; m < ny0; ++m)
        for (int i = 0; i < ny; ++i) phi[i] += contrib[m][i];
    return phi;
}

RepresentationResult spectral_representation_extrapolated(
    const ShearProfile& p, int k, const std::function<cplx(double)>& X, double a, double t,
    double eps1, double eps2, int ny0, const ChannelGrid& g) {
    if (!(eps1 > eps2 && eps2 > 0.0))
        throw std::invalid_argument("spectral_representation_extrapolated: need eps1 > eps2 > 0");
    auto p1 = spectral_representation(p, k, X, a, t, eps1, ny0, g);
    auto p2 = spectral_representation(p, k, X, a, t, eps2, ny0, g);
    // Richardson assuming leading O(eps) error: phi0 = p2 + (p2-p1) * e2/(e1-e2)
    RepresentationResult r;
    r.phi.resize(p1.size());
    double c = eps2 / (eps1 - eps2);
    std::vector<cplx> diff(p1.size());
    for (size_t i = 0; i < p1.size(); ++i) {
        diff[i] = p2[i] - p1[i];
        r.phi[i] = p2[i] + c * diff[i];
    }
    double h = g.hy();
    r.disagreement = l2_norm(diff, h) / std::max(l2_norm(r.phi, h), 1e-300);
    if (r.disagreement > 0.05)
        std::fprintf(stderr, "spectral_representation: extrapolation disagreement %.3g > 5%%\n",
                     r.disagreement);
    return r;
}

} // namespace shearlab
