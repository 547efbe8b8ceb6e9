#pragma once
// Interpolation helpers: Fritsch-Carlson monotone cubic for strictly monotone
// data (used for b^{-1} and the inverse coordinate map), and Catmull-Rom
// cubics for field resampling.

#include <vector>

namespace shearlab {

class MonotoneCubic {
public:
    // x strictly increasing; y monotone. Evaluation clamps to the data range
    // with linear extrapolation at the ends.
    static MonotoneCubic fit(std::vector<double> x, std::vector<double> y);
    double operator()(double xq) const;

private:
    std::vector<double> x_, y_, m_; // m_: node slopes
};

// Catmull-Rom on uniformly spaced samples; q is the fractional index.
// periodic variant wraps; clamped variant repeats the edge values.
double catmull_rom_periodic(const std::vector<double>& v, double q);
double catmull_rom_clamped(const std::vector<double>& v, double q);

} // namespace shearlab
