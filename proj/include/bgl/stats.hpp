#pragma once

#include <bgl/errors.hpp>

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace bgl {

struct KsResult {
    double statistic;
    double p_value;
};

// Asymptotic Kolmogorov survival function Q(lambda).
inline double kolmogorov_sf(double lambda) {
    if (lambda < 1e-3) return 1.0;
    if (lambda < 1.18) {
        // small-lambda theta-function form converges faster here
        const double pi = 3.14159265358979323846;
        const double w = -pi * pi / (8 * lambda * lambda);
        double s = 0;
        for (int k = 1; k <= 7; k += 2) s += std::exp(k * k * w);
        return std::clamp(1.0 - std::sqrt(2 * pi) / lambda * s, 0.0, 1.0);
    }
    double s = 0, sign = 1;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        s += sign * term;
        if (term < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2 * s, 0.0, 1.0);
}

inline double ks_p_value(double d, double n_eff) {
    const double sn = std::sqrt(n_eff);
    return kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
}

inline KsResult ks_one_sample(std::vector<double> a, const std::function<double(double)>& cdf) {
    if (a.empty()) throw DomainError("ks: empty sample");
    std::sort(a.begin(), a.end());
    const double n = static_cast<double>(a.size());
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double f = cdf(a[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return {d, ks_p_value(d, n)};
}

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return {d, ks_p_value(d, na * nb / (na + nb))};
}

struct Interval {
    double lower;
    double upper;
};

inline double normal_quantile_two_sided(double level) {
    if (!(level > 0 && level < 1)) throw DomainError("confidence level must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + level / 2);
}

inline Interval wilson_ci(std::size_t hits, std::size_t trials, double level = 0.95) {
    if (hits > trials) throw DomainError("wilson: hits exceed trials");
    if (trials == 0) return {0.0, 1.0};
    const double z = normal_quantile_two_sided(level);
    const double n = static_cast<double>(trials), p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double centre = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z / (1 + z2 / n) * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
    return {hits == 0 ? 0.0 : std::max(0.0, centre - half), hits == trials ? 1.0 : std::min(1.0, centre + half)};
}

struct TailEstimate {
    double threshold = 0;
    std::size_t hits = 0;
    std::size_t trials = 0;
    double estimate = 0;
    Interval ci{0, 1};

    static TailEstimate make(double threshold, std::size_t hits, std::size_t trials, double level = 0.95) {
        TailEstimate t;
        t.threshold = threshold;
        t.hits = hits;
        t.trials = trials;
        t.estimate = trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
        t.ci = wilson_ci(hits, trials, level);
        return t;
    }
    // Binomial standard error of the point estimate.
    double stderr_() const {
        if (trials == 0) return 0;
        return std::sqrt(estimate * (1 - estimate) / static_cast<double>(trials));
    }
};

// Empirical P(X >= threshold) for each threshold.
inline std::vector<TailEstimate> tail_estimates(std::vector<double> sample, const std::vector<double>& thresholds,
                                                double level = 0.95) {
    std::sort(sample.begin(), sample.end());
    std::vector<TailEstimate> out;
    for (double t : thresholds) {
        const auto it = std::lower_bound(sample.begin(), sample.end(), t);
        out.push_back(TailEstimate::make(t, static_cast<std::size_t>(sample.end() - it), sample.size(), level));
    }
    return out;
}

inline double mean(const std::vector<double>& v) {
    if (v.empty()) return 0;
    double s = 0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0;
    const double m = mean(v);
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2) throw DomainError("correlation: size mismatch");
    const double ma = mean(a), mb = mean(b);
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

struct LinearFit {
    double slope;
    double intercept;
    double r2;
    double slope_se;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("linear fit: need at least two points");
    const double n = static_cast<double>(x.size());
    const double mx = mean(x), my = mean(y);
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0) throw DegenerateInput("linear fit: constant abscissae");
    const double b = sxy / sxx;
    const double a = my - b * mx;
    const double sse = std::max(0.0, syy - b * sxy);
    const double r2 = syy > 0 ? 1 - sse / syy : 1.0;
    const double se = x.size() > 2 ? std::sqrt(sse / (n - 2) / sxx) : 0.0;
    return {b, a, r2, se};
}

}  // namespace bgl
