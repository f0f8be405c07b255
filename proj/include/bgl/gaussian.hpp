#pragma once

#include <bgl/errors.hpp>

#include <cmath>
#include <numbers>

namespace bgl {

struct GaussParams {
    double mean = 0.0;
    double variance = 1.0;
    GaussParams(double m, double v) : mean(m), variance(v) {
        if (!(v > 0) || !std::isfinite(v) || !std::isfinite(m)) throw DomainError("gaussian: variance must be > 0");
    }
    double sd() const { return std::sqrt(variance); }
};

inline void require_variance(double v) {
    if (!(v > 0) || !std::isfinite(v)) throw DomainError("nonpositive variance");
}

// phi_{s2}(x)
inline double phi(double variance, double x) {
    require_variance(variance);
    return std::exp(-x * x / (2 * variance)) / std::sqrt(2 * std::numbers::pi * variance);
}

inline double log_phi(double variance, double x) {
    require_variance(variance);
    return -x * x / (2 * variance) - 0.5 * std::log(2 * std::numbers::pi * variance);
}

// Signed integral of phi_{s2} over [0,x].
inline double phi_tilde(double variance, double x) {
    require_variance(variance);
    return 0.5 * std::erf(x / std::sqrt(2 * variance));
}

// Standard normal CDF and upper tail.
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }
inline double normal_sf(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

// log P(N(0,1) > z), stable far into the upper tail.
inline double log_normal_sf(double z) {
    if (z < 30.0) return std::log(normal_sf(z));
    const double z2 = z * z;
    const double series = 1 - 1 / z2 + 3 / (z2 * z2) - 15 / (z2 * z2 * z2) + 105 / (z2 * z2 * z2 * z2);
    return -0.5 * z2 - std::log(z * std::sqrt(2 * std::numbers::pi)) + std::log(series);
}

// P(N(m, v) >= t)
inline double gauss_sf(const GaussParams& g, double t) { return normal_sf((t - g.mean) / g.sd()); }
inline double log_gauss_sf(const GaussParams& g, double t) { return log_normal_sf((t - g.mean) / g.sd()); }

}  // namespace bgl
