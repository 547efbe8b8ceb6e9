// Benchmark: OpenMP-parallel kernels vs their serial reference twins.
// Checks agreement first (the references are also the test oracles), then
// reports wall times and speedup.

#include <chrono>
#include <cmath>
#include <cstdio>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "shearlab/nonlinear.hpp"
#include "shearlab/poisson.hpp"
#include "shearlab/profiles.hpp"

using namespace shearlab;
using clk = std::chrono::steady_clock;

static double seconds_since(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

int main(int argc, char** argv) {
    int nx = 128, ny = 513, reps = 20;
    if (argc > 1) nx = std::atoi(argv[1]);
    if (argc > 2) ny = std::atoi(argv[2]);
    if (argc > 3) reps = std::atoi(argv[3]);
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (no OpenMP)\n");
#endif
    std::printf("grid: nx=%d ny=%d reps=%d\n", nx, ny, reps);

    ChannelGrid g = ChannelGrid::make(nx, ny);
    ShearProfile p = make_perturbed_monotone(0.1, 0.1);
    ChannelField om = make_initial_data(g, 0.1, 1e-3);

    // agreement: parallel and serial twins must match to roundoff
    ChannelField r_par = rhs(om, p);
    ChannelField r_ser = ref::rhs_serial(om, p);
    double dmax = 0.0;
    for (size_t i = 0; i < r_par.values.size(); ++i)
        dmax = std::max(dmax, std::abs(r_par.values[i] - r_ser.values[i]));
    std::printf("rhs parallel-vs-serial max abs diff: %.3e (scale %.3e)\n", dmax,
                r_par.max_abs());
    if (dmax > 1e-14 * std::max(1.0, r_par.max_abs())) {
        std::printf("FAIL: kernels disagree\n");
        return 1;
    }

    auto t0 = clk::now();
    for (int r = 0; r < reps; ++r) r_par = rhs(om, p);
    double tp = seconds_since(t0) / reps;
    t0 = clk::now();
    for (int r = 0; r < reps; ++r) r_ser = ref::rhs_serial(om, p);
    double ts = seconds_since(t0) / reps;
    std::printf("rhs:      parallel %.4f s   serial %.4f s   speedup %.2fx\n", tp, ts, ts / tp);

    // per-mode Poisson: banded Thomas solve vs Green-quadrature reference
    auto modes = mode_decompose(om);
    const ModeFunction& f1 = modes[1];
    ModeFunction a = poisson_mode_solve(g, f1);
    ModeFunction b = ref::poisson_green_quadrature(g, f1);
    double pmax = 0.0, scale = 0.0;
    for (int j = 0; j < g.ny; ++j) {
        pmax = std::max(pmax, std::abs(a.values[j] - b.values[j]));
        scale = std::max(scale, std::abs(a.values[j]));
    }
    std::printf("poisson banded-vs-quadrature max abs diff: %.3e (scale %.3e)\n", pmax, scale);

    t0 = clk::now();
    for (int r = 0; r < reps; ++r) a = poisson_mode_solve(g, f1);
    double tb = seconds_since(t0) / reps;
    t0 = clk::now();
    for (int r = 0; r < reps; ++r) b = ref::poisson_green_quadrature(g, f1);
    double tq = seconds_since(t0) / reps;
    std::printf("poisson:  banded  %.6f s   quadrature %.6f s   ratio %.1fx\n", tb, tq, tq / tb);
    std::printf("OK\n");
    return 0;
}
