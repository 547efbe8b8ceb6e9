#include "shearlab/fft.hpp"

#include <fftw3.h>
#include <mutex>
#include <stdexcept>

namespace shearlab::fft {

namespace {
std::mutex planner_mutex;
}

void dft_many(std::complex<double>* data, int n, int howmany, int stride, int dist, int sign) {
    if (n <= 0 || howmany <= 0) throw std::invalid_argument("dft_many: bad sizes");
    fftw_complex* p = reinterpret_cast<fftw_complex*>(data);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        plan = fftw_plan_many_dft(1, &n, howmany, p, nullptr, stride, dist,
                                  p, nullptr, stride, dist,
                                  sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                  FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("dft_many: fftw plan failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(plan);
    }
}

std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& in, int sign) {
    std::vector<std::complex<double>> out(in);
    dft_many(out.data(), static_cast<int>(out.size()), 1, 1, 1, sign);
    return out;
}

} // namespace shearlab::fft
