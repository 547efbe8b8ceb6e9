#pragma once
// Discretization of T x [0,1]: uniform x grid (nx points, spacing 2*pi/nx),
// uniform y grid (ny nodes including both walls). Fields are row-major
// values[i*ny + j] with i the x index.

#include <complex>
#include <string>
#include <vector>

namespace shearlab {

struct ChannelGrid {
    int nx = 0;
    int ny = 0;
    double dealias_fraction = 2.0 / 3.0;
    std::vector<double> y_nodes;

    static ChannelGrid make(int nx, int ny, double dealias_fraction = 2.0 / 3.0);

    double hy() const { return 1.0 / (ny - 1); }
    double hx() const { return 2.0 * 3.14159265358979323846 / nx; }
    double x(int i) const { return hx() * i; }
    int kmax() const { return nx / 2; }
    // highest mode kept by the dealiasing rule
    int kcut() const;
    bool same_as(const ChannelGrid& o) const { return nx == o.nx && ny == o.ny; }
};

struct ChannelField {
    ChannelGrid grid;
    std::vector<double> values; // nx*ny row-major
    std::string name;

    ChannelField() = default;
    ChannelField(const ChannelGrid& g, std::string nm = "");
    double& at(int i, int j) { return values[size_t(i) * grid.ny + j]; }
    double at(int i, int j) const { return values[size_t(i) * grid.ny + j]; }
    double max_abs() const;

    // binary layout: int64 nx, int64 ny (little endian), then nx*ny real64 row-major
    void write_bin(const std::string& path) const;
    static ChannelField read_bin(const std::string& path);
    void write_csv(const std::string& path) const; // x,y,value triples
};

struct ModeFunction {
    int k = 0;
    std::vector<std::complex<double>> values; // over y_nodes
};

// Fourier coefficients c_k(y), k=0..nx/2, with f(x,y) = sum_k c_k e^{ikx},
// c_{-k} = conj(c_k). c_0 is real for real fields.
std::vector<ModeFunction> mode_decompose(const ChannelField& f);
ChannelField mode_assemble(const ChannelGrid& g, const std::vector<ModeFunction>& modes,
                           const std::string& name = "");
// exact x-mean via the k=0 coefficient
std::vector<double> x_average(const ChannelField& f);

// trapezoid rule over y_nodes
double trapz(const std::vector<double>& f, double h);

// fourth-order d/dy on the y grid (one-sided at the edges)
std::vector<double> deriv_y(const std::vector<double>& f, double h);
std::vector<std::complex<double>> deriv_y(const std::vector<std::complex<double>>& f, double h);

} // namespace shearlab
