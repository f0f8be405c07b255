#pragma once

#include <bgl/brownian.hpp>
#include <bgl/errors.hpp>
#include <bgl/gaussian.hpp>
#include <bgl/grid.hpp>
#include <bgl/meander.hpp>
#include <bgl/random.hpp>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace bgl {

struct Window {
    double lo, hi;
    bool contains(double x) const { return x >= lo && x <= hi; }
};

struct NearTouchSpec {
    double eta;
    double a;
    double d = 0.5;
    std::optional<Window> interval;

    NearTouchSpec(double eta_, double a_, double d_ = 0.5, std::optional<Window> I = std::nullopt)
        : eta(eta_), a(a_), d(d_), interval(I) {
        if (!(eta > 0 && eta < 1) || !(a > 0 && a < 1)) throw DomainError("near touch: need 0 < a, eta < 1");
        if (I && (I->lo < -d - 1e-12 || I->hi > d + 1e-12 || I->lo > I->hi))
            throw DomainError("near touch: interval must lie in [-d, d]");
    }
};

struct GridMax {
    std::size_t index;
    double value;
    bool tied;
};

// Leftmost grid maximiser; ties are flagged.
inline GridMax grid_max(const GridFunction& f) {
    GridMax m{0, f[0], false};
    for (std::size_t i = 1; i < f.size(); ++i) {
        if (f[i] > m.value) {
            m = {i, f[i], false};
        } else if (f[i] == m.value) {
            m.tied = true;
        }
    }
    return m;
}

namespace detail {
// Grid points at distance >= eta from x0, allowing for the rounding of x(i).
inline bool far_from(const Grid& g, std::size_t i, double x0, double eta) {
    return std::abs(g.x(i) - x0) >= eta - 1e-9 * g.h();
}
}  // namespace detail

inline bool nt_event(const GridFunction& path, const NearTouchSpec& spec) {
    const auto m = grid_max(path);
    const Grid& g = path.grid();
    const double xm = g.x(m.index);
    const double level = m.value - spec.a * std::sqrt(spec.eta);
    for (std::size_t i = 0; i < path.size(); ++i)
        if (detail::far_from(g, i, xm, spec.eta) && path[i] >= level) return true;
    return false;
}

inline bool maxloc_event(const GridFunction& path, const Window& I) {
    return I.contains(path.grid().x(grid_max(path).index));
}

inline double arcsin_measure(double a, double b, double d) {
    if (!(d > 0) || a > b || a < -d - 1e-12 || b > d + 1e-12) throw DomainError("arcsine: need -d <= a <= b <= d");
    auto F = [d](double x) { return std::asin(std::clamp(x / d, -1.0, 1.0)); };
    return (F(b) - F(a)) / std::numbers::pi;
}

inline double arcsin_cdf(double x, double d) { return arcsin_measure(-d, std::clamp(x, -d, d), d); }

namespace detail {
// Largest eta-separated subset of qualifying grid points; greedy from the left is optimal.
inline int greedy_separated(const Grid& g, const std::vector<char>& ok, double eta) {
    int count = 0;
    double last = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < ok.size(); ++i) {
        if (!ok[i]) continue;
        const double x = g.x(i);
        if (count == 0 || x - last >= eta - 1e-9 * g.h()) {
            ++count;
            last = x;
        }
    }
    return count;
}
}  // namespace detail

inline int num_nt(const GridFunction& path, double eta) {
    if (!(eta > 0)) throw DomainError("num_nt: eta must be > 0");
    const double level = grid_max(path).value - std::sqrt(eta);
    std::vector<char> ok(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) ok[i] = path[i] >= level;
    return detail::greedy_separated(path.grid(), ok, eta);
}

inline bool nz_event(const GridFunction& meander, double eta, double a) {
    if (eta > 1) return false;
    const Grid& g = meander.grid();
    const double level = a * std::sqrt(eta);
    for (std::size_t i = 0; i < meander.size(); ++i)
        if (g.x(i) >= eta - 1e-9 * g.h() && meander[i] < level) return true;
    return false;
}

inline int num_nz(const GridFunction& path, double eta) {
    if (!(eta > 0)) throw DomainError("num_nz: eta must be > 0");
    const double level = std::sqrt(eta);
    std::vector<char> ok(path.size());
    for (std::size_t i = 0; i < path.size(); ++i) ok[i] = std::abs(path[i]) <= level;
    return detail::greedy_separated(path.grid(), ok, eta);
}

enum class MeanderBound { from_zero, increment, return_from_above };

inline std::string to_string(MeanderBound b) {
    switch (b) {
        case MeanderBound::from_zero: return "from-zero";
        case MeanderBound::increment: return "increment";
        default: return "return-from-above";
    }
}

namespace detail {
template <class F>
double integrate(F f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}
}  // namespace detail

// from-zero: P(B_me(eta) < 1.1 sqrt(eta)); increment: P(B_me(t) < 1.1 sqrt(eta) | B_me(t - eta) = x);
// return-from-above: P(inf over [t - eta, 1] of B < sqrt(eta) - x | inf > -x) by the folded normal law.
inline double meander_bound_quadrature(MeanderBound which, double eta, double t = 0, double x = 0) {
    const double se = std::sqrt(eta);
    switch (which) {
        case MeanderBound::from_zero: {
            if (!(eta > 0 && eta <= 0.5)) throw DomainError("from-zero: eta must lie in (0, 1/2]");
            return detail::integrate([eta](double y) { return meander_marginal_density(eta, y); }, 0.0, 1.1 * se);
        }
        case MeanderBound::increment: {
            if (!(eta > 0 && t > eta && t <= 1 - 4 * eta)) throw DomainError("increment: need t in (eta, 1 - 4 eta]");
            if (!(x > 0 && x <= 1.1 * se)) throw DomainError("increment: need 0 < x <= 1.1 sqrt(eta)");
            const MeanderState from(t - eta, x);
            return detail::integrate([&](double y) { return y > 0 ? meander_transition_density(from, {t, y}) : 0.0; },
                                     0.0, 1.1 * se);
        }
        case MeanderBound::return_from_above: {
            if (!(eta > 0 && t > eta && t <= 1 - 10 * eta)) throw DomainError("return-from-above: need t in (eta, 1 - 10 eta]");
            if (!(x > 1.1 * se)) throw DomainError("return-from-above: need x > 1.1 sqrt(eta)");
            const double v = 1 - (t - eta);
            return (phi_tilde(v, x) - phi_tilde(v, x - se)) / phi_tilde(v, x);
        }
    }
    return 0;
}

struct LatticeMax {
    double value;
    double eta, t, x;
    std::size_t points;
};

// Worst case of a bound over its declared parameter lattice.
inline LatticeMax meander_bound_lattice(MeanderBound which) {
    LatticeMax w{-1, 0, 0, 0, 0};
    auto visit = [&](double v, double eta, double t, double x) {
        ++w.points;
        if (v > w.value) w = {v, eta, t, x, w.points};
    };
    if (which == MeanderBound::from_zero) {
        for (int i = 1; i <= 50; ++i) {
            const double eta = 0.5 * i / 50;
            visit(meander_bound_quadrature(which, eta), eta, 0, 0);
        }
        return w;
    }
    for (double eta : {0.005, 0.01, 0.02, 0.05, 0.08}) {
        const double se = std::sqrt(eta);
        const double tmax = which == MeanderBound::increment ? 1 - 4 * eta : 1 - 10 * eta;
        for (int it = 1; it <= 10; ++it) {
            const double t = eta + (tmax - eta) * it / 10;
            for (int ix = 1; ix <= 10; ++ix) {
                const double x = which == MeanderBound::increment ? 1.1 * se * ix / 10 : 1.1 * se * (1 + 0.001 + 0.5 * (ix - 1));
                visit(meander_bound_quadrature(which, eta, t, x), eta, t, x);
            }
        }
    }
    return w;
}

// Closed-form constants of the meander bounds.
inline double from_zero_constant() { return std::pow(1.1, 3) / (3 * std::sqrt(std::numbers::pi)); }
inline double increment_constant() { return 2 * std::pow(1.1, 3) * std::exp(0.4) / (3 * std::sqrt(std::numbers::pi)); }
inline double return_constant() { return std::exp(1.2 / 20) / 1.1; }

struct LemmaCheck {
    std::string name;
    bool ok;
    double worst_margin;  // smallest (bound - value) over the lattice; negative means violated
    std::string detail;
};

// sigma/(2 sqrt(2 pi) t) e^{-t^2/2sigma^2} <= P(N(0,sigma^2) > t) <= e^{-t^2/2sigma^2}, lower bound for t > sigma.
inline LemmaCheck check_normal_bounds() {
    LemmaCheck c{"normal-bounds", true, std::numeric_limits<double>::infinity(), ""};
    for (double sigma : {0.5, 1.0, 2.0})
        for (int i = 1; i <= 60; ++i) {
            const double t = sigma * (0.1 * i);
            const double p = normal_sf(t / sigma);
            const double up = std::exp(-t * t / (2 * sigma * sigma));
            c.worst_margin = std::min(c.worst_margin, up - p);
            if (t > sigma) {
                const double lo = sigma / (2 * std::sqrt(2 * std::numbers::pi) * t) * up;
                c.worst_margin = std::min(c.worst_margin, p - lo);
            }
        }
    c.ok = c.worst_margin >= 0;
    return c;
}

// int_0^inf e^{-a x^2 + b x} dx <= sqrt(pi/a) (b <= 0) and <= sqrt(pi/a) e^{b^2/4a} (all b).
inline LemmaCheck check_integral_bound() {
    LemmaCheck c{"integral-bound", true, std::numeric_limits<double>::infinity(), ""};
    for (double a : {0.25, 0.5, 1.0, 2.0, 5.0})
        for (int ib = -6; ib <= 6; ++ib) {
            const double b = 0.5 * ib;
            const double xmax = (std::max(b, 0.0) / a) + 40 / std::sqrt(a);
            const double v = detail::integrate([a, b](double x) { return std::exp(-a * x * x + b * x); }, 0.0, xmax);
            const double bound = std::sqrt(std::numbers::pi / a) * (b <= 0 ? 1.0 : std::exp(b * b / (4 * a)));
            c.worst_margin = std::min(c.worst_margin, (bound - v) / bound);
        }
    c.ok = c.worst_margin >= 0;
    return c;
}

// X nonnegative with nonincreasing density: P(X >= x | X <= y) <= (y - x)/y.
inline LemmaCheck check_conditioned_inf() {
    LemmaCheck c{"conditioned-inf", true, std::numeric_limits<double>::infinity(), ""};
    for (double v : {0.25, 1.0, 4.0})
        for (int iy = 1; iy <= 10; ++iy) {
            const double y = 0.3 * iy;
            for (int ix = 0; ix < 10; ++ix) {
                const double x = y * ix / 10;
                // folded normal and exponential laws
                const double fold = (phi_tilde(v, y) - phi_tilde(v, x)) / phi_tilde(v, y);
                const double expo = (std::exp(-x / v) - std::exp(-y / v)) / (-std::expm1(-y / v));
                c.worst_margin = std::min(c.worst_margin, (y - x) / y - std::max(fold, expo));
            }
        }
    c.ok = c.worst_margin >= -1e-15;
    return c;
}

struct GeometricTail {
    int n;
    double p, lambda, mu;   // mu = n/p as stated alongside the lemma
    double exact;           // P(G >= lambda mu), Geo(p) with P(X >= k) = (1-p)^k on {0, 1, ...}
    double exact_shifted;   // same with Geo(p) on {1, 2, ...}, whose mean is exactly 1/p
    double empirical;       // Monte Carlo estimate of exact
    std::size_t draws;
    double stated_bound;    // exp(-p mu lambda)
    double janson_bound;    // exp(-p mu (lambda - 1 - ln lambda))
};

inline GeometricTail geometric_sum_tail(int n, double p, double lambda, std::size_t draws, RandomStream& rng) {
    if (n < 1 || !(p > 0 && p < 1) || !(lambda >= 1)) throw DomainError("geometric tail: need n >= 1, p in (0,1), lambda >= 1");
    GeometricTail g{n, p, lambda, n / p, 0, 0, 0, draws, 0, 0};
    const auto m = static_cast<long long>(std::ceil(lambda * g.mu - 1e-12));
    // G >= m iff fewer than n successes in the first m + n - 1 trials (m - 1 for the shifted law)
    auto fewer = [&](long long trials) {
        return trials < n ? 1.0 : boost::math::cdf(boost::math::binomial_distribution<double>(double(trials), p), double(n - 1));
    };
    g.exact = fewer(m + n - 1);
    g.exact_shifted = fewer(m - 1);
    std::size_t hits = 0;
    const double lq = std::log1p(-p);
    for (std::size_t i = 0; i < draws; ++i) {
        long long s = 0;
        for (int j = 0; j < n; ++j) s += static_cast<long long>(std::floor(std::log(rng.uniform_open()) / lq));
        hits += s >= m;
    }
    g.empirical = draws ? double(hits) / double(draws) : 0.0;
    g.stated_bound = std::exp(-p * g.mu * lambda);
    g.janson_bound = std::exp(-p * g.mu * (lambda - 1 - std::log(lambda)));
    return g;
}

struct DensityToolCase {
    double sigma1, sigma2, x0, shift, floor;
    double A;
    double worst_ratio;  // max of f / bound over x < x0
    double global_ratio; // max of f sqrt(2 pi) sigma1 over all x
};

// X ~ N(x0 + shift, sigma2^2) conditioned on X >= x0 - floor; then P(X < x) <= A e^{-(x - x0)^2/2sigma2^2}
// for x < x0 with A = 1/(2 P(untruncated >= x0 - floor)).
inline DensityToolCase density_tool_case(double sigma1, double sigma2, double x0, double shift, double floor) {
    DensityToolCase c{sigma1, sigma2, x0, shift, floor, 0, 0, 0};
    const double lo = x0 - floor;
    const double Z = normal_sf((lo - x0 - shift) / sigma2);
    c.A = 1 / (2 * Z);
    auto nu = [&](double y) { return y < lo ? 0.0 : phi(sigma2 * sigma2, y - x0 - shift) / Z; };
    auto f = [&](double x) {
        const double hi = std::max(lo, x0 + shift) + 12 * (sigma1 + sigma2) + std::abs(x);
        return detail::integrate([&](double y) { return phi(sigma1 * sigma1, x - y) * nu(y); }, lo, hi);
    };
    for (int i = 1; i <= 40; ++i) {
        const double x = x0 - 0.25 * i * (sigma1 + sigma2);
        const double fx = f(x);
        const double bound = (c.A + 1) / (std::sqrt(2 * std::numbers::pi) * sigma1) *
                             std::exp(-(x - x0) * (x - x0) / (2 * (sigma1 + sigma2) * (sigma1 + sigma2)));
        c.worst_ratio = std::max(c.worst_ratio, fx / bound);
    }
    for (int i = -40; i <= 40; ++i) {
        const double x = x0 + 0.25 * i * (sigma1 + sigma2);
        c.global_ratio = std::max(c.global_ratio, f(x) * std::sqrt(2 * std::numbers::pi) * sigma1);
    }
    return c;
}

inline LemmaCheck check_density_tool() {
    LemmaCheck c{"density-tool", true, std::numeric_limits<double>::infinity(), ""};
    for (double s1 : {0.3, 1.0})
        for (double s2 : {0.5, 1.0, 2.0})
            for (double shift : {0.0, 1.0})
                for (double floor : {1.0, 3.0}) {
                    const auto r = density_tool_case(s1, s2, 0.0, shift, floor);
                    c.worst_margin = std::min({c.worst_margin, 1 - r.worst_ratio, 1 - r.global_ratio});
                }
    c.ok = c.worst_margin >= -1e-12;
    return c;
}

// Total mass of the transition density from (s, x) at time t.
inline double meander_transition_mass(double s, double x, double t) {
    const MeanderState from(s, x);
    const double sd = std::sqrt(t - s);
    const double hi = x + 40 * sd;
    auto f = [&](double y) { return y > 0 ? meander_transition_density(from, {t, y}) : 0.0; };
    // split at x keeps the peak on a panel edge
    return detail::integrate(f, 0.0, x) + detail::integrate(f, x, hi);
}

// |int p(s,x; u,z) p(u,z; t,y) dz - p(s,x; t,y)|
inline double chapman_kolmogorov_residual(double s, double x, double u, double t, double y) {
    const MeanderState a(s, x), c(t, y);
    auto f = [&](double z) { return z > 0 ? meander_transition_density(a, {u, z}) * meander_transition_density({u, z}, c) : 0.0; };
    const double hi = std::max(x, y) + 40 * std::sqrt(t - s);
    const double mid = 0.5 * (x + y);
    const double v = detail::integrate(f, 0.0, mid) + detail::integrate(f, mid, hi);
    return std::abs(v - meander_transition_density(a, c));
}

// Brownian motion on [-1/2, 1/2] started from 0.
inline GridFunction sample_bm_centered(std::size_t steps, RandomStream& rng) {
    return sample_motion(Grid(-0.5, 0.5, steps), 0.0, rng);
}

}  // namespace bgl
