#pragma once
// Thin FFTW wrappers. Plan creation is serialized (FFTW planner is not
// thread-safe); execution on caller-owned buffers is.

#include <complex>
#include <vector>

namespace shearlab::fft {

// In-place batched complex DFT: 'howmany' transforms of length n,
// element stride 'stride', batch distance 'dist'. sign: -1 forward, +1 backward.
// No normalization is applied.
void dft_many(std::complex<double>* data, int n, int howmany, int stride, int dist, int sign);

// Convenience: forward DFT of a contiguous complex vector (unnormalized).
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& in, int sign);

} // namespace shearlab::fft
