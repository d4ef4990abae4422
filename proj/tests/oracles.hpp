// Test-only oracles, independent of the library's integration path:
// composite Simpson on explicit grids, closed-form antiderivatives, and a
// Kolmogorov-Smirnov statistic.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson on a uniform grid (n even).
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
    if (n % 2 == 1) ++n;
    double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Simpson under the substitution y = exp(u): handles integrable endpoint
/// singularities at 0 and slow decay at infinity on (lo, hi).
inline double simpson_log(const std::function<double(double)>& f, double lo, double hi,
                          int n = 20000) {
    double a = std::log(lo), b = std::log(hi);
    return simpson([&f](double u) { return f(std::exp(u)) * std::exp(u); }, a, b, n);
}

/// One-sided mass of the density scale*t^{-1-alpha} over (lo, hi).
inline double stable_band_mass(double scale, double alpha, double lo, double hi) {
    double hi_term = std::isinf(hi) ? 0.0 : std::pow(hi, -alpha);
    return scale * (std::pow(lo, -alpha) - hi_term) / alpha;
}

/// KS statistic of samples against a CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double c = cdf(samples[i]);
        worst = std::max(worst, std::abs(c - (i + 1) / n));
        worst = std::max(worst, std::abs(c - i / n));
    }
    return worst;
}

inline double normal_cdf(double x, double mean = 0.0, double sd = 1.0) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::sqrt(2.0)));
}

}  // namespace oracle
