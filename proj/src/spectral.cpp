#include "shearlab/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "shearlab/poisson.hpp"

namespace shearlab {

namespace {
std::vector<double> trapezoid_weights(const ChannelGrid& g) {
    std::vector<double> w(g.ny, g.hy());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}
} // namespace

LkOperator build_Lk(const ShearProfile& p, int k, const ChannelGrid& g) {
    if (k == 0) throw std::invalid_argument("build_Lk: k must be nonzero");
    const int ny = g.ny;
    LkOperator L;
    L.k = k;
    L.profile = &p;
    L.matrix = Eigen::MatrixXcd::Zero(ny, ny);
    auto wq = trapezoid_weights(g);
    for (int i = 0; i < ny; ++i) {
        double yi = g.y_nodes[i];
        double b2i = p.b2(yi);
        for (int j = 0; j < ny; ++j)
            L.matrix(i, j) = b2i * green_function(k, yi, g.y_nodes[j]) * wq[j];
        L.matrix(i, i) += p.b(yi);
    }
    return L;
}

EigenScan eigen_scan(const LkOperator& L, double tol) {
    EigenScan s;
    s.k = L.k;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(L.matrix, false);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigen_scan: eigensolver failed");
    const ShearProfile& p = *L.profile;
    double lo = p.b(0.0), hi = p.b(1.0);
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        cplx ev = es.eigenvalues()[i];
        s.eigenvalues.push_back(ev);
        if (std::abs(ev.imag()) > tol) s.flagged_imag++;
        if (ev.real() < lo - tol || ev.real() > hi + tol) s.flagged_range++;
    }
    s.pass = (s.flagged_imag == 0 && s.flagged_range == 0);
    return s;
}

std::vector<cplx> singular_hat_weights(const ShearProfile& p, const std::vector<double>& y,
                                       double y0, double eps) {
    if (eps == 0.0) throw std::invalid_argument("singular_hat_weights: eps must be nonzero");
    const int n = int(y.size());
    std::vector<cplx> w(n, cplx(0.0, 0.0));
    const double by0 = p.b(y0);
    for (int j = 0; j + 1 < n; ++j) {
        double h = y[j + 1] - y[j];
        double c = p.b(y[j]) - by0;
        double s = (p.b(y[j + 1]) - p.b(y[j])) / h; // >= theta0 > 0 (monotone)
        // d(tau) = c + s tau + i eps on [0,h]; the segment has constant
        // imaginary part eps != 0, so the principal log is continuous on it.
        cplx d0(c, eps), d1(c + s * h, eps);
        cplx I0 = (std::log(d1) - std::log(d0)) / s;
        cplx I1 = (h - d0 * I0) / s; // int tau/d dtau
        w[j] += I0 - I1 / h;         // left hat
        w[j + 1] += I1 / h;          // right hat
    }
    return w;
}

double t_cutoff(const ShearProfile& p, double y) {
    double t0 = p.theta0;
    auto psi = gevrey_cutoff(p.b(t0 / 4.0), p.b(t0 / 3.0), p.b(1.0 - t0 / 3.0), p.b(1.0 - t0 / 4.0),
                             0.75);
    return psi(p.b(y));
}

Eigen::MatrixXcd t_operator_matrix(const ShearProfile& p, int k, double y0, double eps,
                                   const ChannelGrid& g) {
    if (k == 0) throw std::invalid_argument("t_operator_matrix: k must be nonzero");
    if (eps == 0.0 || std::abs(eps) > 0.25)
        throw std::invalid_argument("t_operator_matrix: eps in [-1/4,1/4] \\ {0}");
    const int ny = g.ny;
    auto sw = singular_hat_weights(p, g.y_nodes, y0, eps);
    Eigen::MatrixXcd T(ny, ny);
    for (int i = 0; i < ny; ++i) {
        double phi = t_cutoff(p, g.y_nodes[i]);
        for (int j = 0; j < ny; ++j)
            T(i, j) = phi * green_function(k, g.y_nodes[i], g.y_nodes[j]) * p.b2(g.y_nodes[j]) * sw[j];
    }
    return T;
}

std::vector<cplx> t_operator_apply(const ShearProfile& p, int k, double y0, double eps,
                                   const std::vector<cplx>& f, const ChannelGrid& g) {
    auto T = t_operator_matrix(p, k, y0, eps, g);
    Eigen::Map<const Eigen::VectorXcd> fv(f.data(), f.size());
    Eigen::VectorXcd out = T * fv;
    return std::vector<cplx>(out.data(), out.data() + out.size());
}

Eigen::MatrixXd h1k_gram_cholesky(const ChannelGrid& g, int k) {
    if (k == 0) throw std::invalid_argument("h1k_gram_cholesky: k must be nonzero");
    const int ny = g.ny;
    const double h = g.hy();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ny, ny);
    auto wq = trapezoid_weights(g);
    for (int i = 0; i < ny; ++i) M(i, i) = wq[i];
    // derivative part: midpoint difference quotients, midpoint-rule L^2
    double c = 1.0 / (double(k) * k * h);
    for (int j = 0; j + 1 < ny; ++j) {
        M(j, j) += c;
        M(j + 1, j + 1) += c;
        M(j, j + 1) -= c;
        M(j + 1, j) -= c;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success) throw std::runtime_error("h1k_gram_cholesky: LLT failed");
    return Eigen::MatrixXd(llt.matrixU()); // M = R^T R with R upper triangular
}

double h1k_norm(const std::vector<cplx>& f, const ChannelGrid& g, int k) {
    const int ny = g.ny;
    const double h = g.hy();
    auto wq = trapezoid_weights(g);
    double l2 = 0.0, d2 = 0.0;
    for (int j = 0; j < ny; ++j) l2 += wq[j] * std::norm(f[j]);
    for (int j = 0; j + 1 < ny; ++j) d2 += h * std::norm((f[j + 1] - f[j]) / h);
    return std::sqrt(l2) + std::sqrt(d2) / std::abs(double(k));
}

namespace {
double sigma_min_Iplus(const Eigen::MatrixXcd& T, const Eigen::MatrixXd& R) {
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(T.rows(), T.cols()) + T;
    Eigen::MatrixXcd B =
        R.cast<cplx>() * A * R.cast<cplx>().triangularView<Eigen::Upper>().solve(
                                 Eigen::MatrixXcd::Identity(T.rows(), T.cols()));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
    return svd.singularValues().minCoeff();
}
} // namespace

double t_operator_norm(const ShearProfile& p, int k, double y0, double eps, const ChannelGrid& g) {
    auto T = t_operator_matrix(p, k, y0, eps, g);
    auto R = h1k_gram_cholesky(g, k);
    Eigen::MatrixXcd B =
        R.cast<cplx>() * T * R.cast<cplx>().triangularView<Eigen::Upper>().solve(
                                 Eigen::MatrixXcd::Identity(T.rows(), T.cols()));
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
    return svd.singularValues().maxCoeff();
}

std::vector<double> default_y0_grid(int n) {
    // irrational offset keeps y0 away from grid nodes (quadrature robustness)
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = (i + 0.381966011250105) / n;
    return v;
}

SpectralReport kappa_estimate(const ShearProfile& p, const std::vector<int>& ks,
                              const std::vector<double>& y0s, const std::vector<double>& eps_seq,
                              const ChannelGrid& g) {
    if (eps_seq.size() < 2) throw std::invalid_argument("kappa_estimate: need >= 2 eps values");
    SpectralReport rep;
    rep.k_values = ks;
    rep.kappa_min = 1e300;
    rep.max_eps_drift = 0.0;
    for (int k : ks) rep.scans.push_back(eigen_scan(build_Lk(p, k, g), 1e-7));
    const int ne = int(eps_seq.size());
    struct Task {
        int k;
        double y0;
    };
    std::vector<Task> tasks;
    for (int k : ks)
        for (double y0 : y0s) tasks.push_back({k, y0});
    std::vector<std::vector<double>> kap(tasks.size(), std::vector<double>(ne, 0.0));
#pragma omp parallel for schedule(dynamic)
    for (int ti = 0; ti < int(tasks.size()); ++ti) {
        auto R = h1k_gram_cholesky(g, tasks[ti].k);
        for (int e = 0; e < ne; ++e) {
            auto T = t_operator_matrix(p, tasks[ti].k, tasks[ti].y0, eps_seq[e], g);
            kap[ti][e] = sigma_min_Iplus(T, R);
        }
    }
    for (size_t ti = 0; ti < tasks.size(); ++ti) {
        for (int e = 0; e < ne; ++e)
            rep.samples.push_back({tasks[ti].k, tasks[ti].y0, eps_seq[e], kap[ti][e]});
        double a = kap[ti][ne - 2], b = kap[ti][ne - 1];
        rep.kappa_min = std::min(rep.kappa_min, b);
        double drift = std::abs(a - b) / std::max(std::abs(b), 1e-300);
        rep.max_eps_drift = std::max(rep.max_eps_drift, drift);
    }
    rep.resolved = rep.max_eps_drift <= 0.20;
    bool scans_ok = true;
    for (const auto& s : rep.scans) scans_ok = scans_ok && s.pass;
    rep.pass = rep.resolved && rep.kappa_min > 0.0 && scans_ok;
    return rep;
}

std::string SpectralReport::to_json() const {
    std::string out = "{\"k_values\":[";
    char buf[256];
    for (size_t i = 0; i < k_values.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%d%s", k_values[i], i + 1 < k_values.size() ? "," : "");
        out += buf;
    }
    std::snprintf(buf, sizeof(buf),
                  "],\"kappa_min\":%.17g,\"max_eps_drift\":%.17g,\"resolved\":%s,\"pass\":%s,",
                  kappa_min, max_eps_drift, resolved ? "true" : "false", pass ? "true" : "false");
    out += buf;
    out += "\"scans\":[";
    for (size_t i = 0; i < scans.size(); ++i) {
        std::snprintf(buf, sizeof(buf),
                      "{\"k\":%d,\"flagged_imag\":%d,\"flagged_range\":%d,\"pass\":%s}%s",
                      scans[i].k, scans[i].flagged_imag, scans[i].flagged_range,
                      scans[i].pass ? "true" : "false", i + 1 < scans.size() ? "," : "");
        out += buf;
    }
    out += "],\"samples\":[";
    for (size_t i = 0; i < samples.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "{\"k\":%d,\"y0\":%.17g,\"eps\":%.17g,\"kappa\":%.17g}%s",
                      samples[i].k, samples[i].y0, samples[i].eps, samples[i].kappa,
                      i + 1 < samples.size() ? "," : "");
        out += buf;
    }
    out += "]}";
    return out;
}

} // namespace shearlab
