#include "shearlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "shearlab/fft.hpp"

namespace shearlab {

ChannelGrid ChannelGrid::make(int nx, int ny, double dealias_fraction) {
    if (nx < 16 || nx % 2 != 0) throw std::invalid_argument("ChannelGrid: nx must be even and >= 16");
    if (ny < 65) throw std::invalid_argument("ChannelGrid: ny must be >= 65");
    if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0))
        throw std::invalid_argument("ChannelGrid: dealias_fraction in (0,1]");
    ChannelGrid g;
    g.nx = nx;
    g.ny = ny;
    g.dealias_fraction = dealias_fraction;
    g.y_nodes.resize(ny);
    for (int j = 0; j < ny; ++j) g.y_nodes[j] = double(j) / (ny - 1);
    g.y_nodes.front() = 0.0;
    g.y_nodes.back() = 1.0;
    return g;
}

int ChannelGrid::kcut() const {
    int kc = int(std::floor(dealias_fraction * (nx / 2)));
    return std::min(kc, nx / 2);
}

ChannelField::ChannelField(const ChannelGrid& g, std::string nm)
    : grid(g), values(size_t(g.nx) * g.ny, 0.0), name(std::move(nm)) {}

double ChannelField::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

void ChannelField::write_bin(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_bin: cannot open " + path);
    int64_t hdr[2] = {grid.nx, grid.ny};
    os.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
    os.write(reinterpret_cast<const char*>(values.data()),
             std::streamsize(values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("write_bin: write failed for " + path);
}

ChannelField ChannelField::read_bin(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_bin: cannot open " + path);
    int64_t hdr[2];
    is.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    if (!is) throw std::runtime_error("read_bin: bad header in " + path);
    ChannelField f(ChannelGrid::make(int(hdr[0]), int(hdr[1])));
    is.read(reinterpret_cast<char*>(f.values.data()),
            std::streamsize(f.values.size() * sizeof(double)));
    if (!is) throw std::runtime_error("read_bin: truncated data in " + path);
    return f;
}

void ChannelField::write_csv(const std::string& path) const {
    std::FILE* fp = std::fopen(path.c_str(), "w");
    if (!fp) throw std::runtime_error("write_csv: cannot open " + path);
    std::fprintf(fp, "x,y,value\n");
    for (int i = 0; i < grid.nx; ++i)
        for (int j = 0; j < grid.ny; ++j)
            std::fprintf(fp, "%.17g,%.17g,%.17g\n", grid.x(i), grid.y_nodes[j], at(i, j));
    std::fclose(fp);
}

std::vector<ModeFunction> mode_decompose(const ChannelField& f) {
    const int nx = f.grid.nx, ny = f.grid.ny;
    std::vector<std::complex<double>> buf(size_t(nx) * ny);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) buf[size_t(i) * ny + j] = f.at(i, j);
    // one length-nx transform per y node: stride ny, dist 1
    fft::dft_many(buf.data(), nx, ny, ny, 1, -1);
    std::vector<ModeFunction> modes(nx / 2 + 1);
    for (int k = 0; k <= nx / 2; ++k) {
        modes[k].k = k;
        modes[k].values.resize(ny);
        for (int j = 0; j < ny; ++j) modes[k].values[j] = buf[size_t(k) * ny + j] / double(nx);
    }
    return modes;
}

ChannelField mode_assemble(const ChannelGrid& g, const std::vector<ModeFunction>& modes,
                           const std::string& name) {
    const int nx = g.nx, ny = g.ny;
    if (int(modes.size()) != nx / 2 + 1) throw std::invalid_argument("mode_assemble: mode count");
    std::vector<std::complex<double>> buf(size_t(nx) * ny, {0.0, 0.0});
    for (int k = 0; k <= nx / 2; ++k) {
        if (modes[k].k != k || int(modes[k].values.size()) != ny)
            throw std::invalid_argument("mode_assemble: mode layout");
        for (int j = 0; j < ny; ++j) {
            buf[size_t(k) * ny + j] = modes[k].values[j];
            if (k > 0 && k < nx / 2)
                buf[size_t(nx - k) * ny + j] = std::conj(modes[k].values[j]);
        }
    }
    fft::dft_many(buf.data(), nx, ny, ny, 1, +1);
    ChannelField f(g, name);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) f.at(i, j) = buf[size_t(i) * ny + j].real();
    return f;
}

std::vector<double> x_average(const ChannelField& f) {
    const int nx = f.grid.nx, ny = f.grid.ny;
    std::vector<double> avg(ny, 0.0);
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j) avg[j] += f.at(i, j);
    for (double& a : avg) a /= nx;
    return avg;
}

double trapz(const std::vector<double>& f, double h) {
    double s = 0.5 * (f.front() + f.back());
    for (size_t j = 1; j + 1 < f.size(); ++j) s += f[j];
    return s * h;
}

namespace {
template <typename T>
std::vector<T> deriv_y_impl(const std::vector<T>& f, double h) {
    const int n = int(f.size());
    if (n < 5) throw std::invalid_argument("deriv_y: need >= 5 nodes");
    std::vector<T> d(n);
    const double c = 1.0 / (12.0 * h);
    for (int j = 2; j < n - 2; ++j)
        d[j] = (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]) * c;
    // 4th-order one-sided stencils at the edges
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * c;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * c;
    d[n - 2] = (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * c;
    d[n - 1] = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * c;
    return d;
}
} // namespace

std::vector<double> deriv_y(const std::vector<double>& f, double h) { return deriv_y_impl(f, h); }
std::vector<std::complex<double>> deriv_y(const std::vector<std::complex<double>>& f, double h) {
    return deriv_y_impl(f, h);
}

} // namespace shearlab
