#pragma once
// Least-squares slope fitting for decay-rate diagnostics.

#include <vector>

namespace shearlab {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double ci95 = 0.0; // 95% half-width on the slope
    int n = 0;
};

FitResult linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// slope of log|v| vs log t restricted to t in [t1,t2]; nonpositive v are skipped
FitResult loglog_fit(const std::vector<double>& t, const std::vector<double>& v, double t1, double t2);

// envelope slope for oscillating signals bounded by a power law (sup-type decay
// statements): the maximum of v over each of `blocks` geometric time blocks
// spanning [t1,t2] is fitted log-log at the time where it is attained
FitResult envelope_loglog_fit(const std::vector<double>& t, const std::vector<double>& v,
                              double t1, double t2, int blocks = 6);

} // namespace shearlab
