#pragma once

#include <bgl/errors.hpp>
#include <bgl/gaussian.hpp>
#include <bgl/grid.hpp>
#include <bgl/random.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>
#include <optional>

namespace bgl {

struct MeanderState {
    double time;
    double value;
    MeanderState(double t, double v) : time(t), value(v) {
        if (!(t > 0 && t <= 1)) throw DomainError("meander state: time must lie in (0,1]");
        if (!(v >= 0)) throw DomainError("meander state: value must be nonnegative");
    }
};

// Phi~_{1-t}(y) with the analytic t -> 1 limit.
inline double meander_survival_factor(double t, double y) {
    const double rem = 1.0 - t;
    if (rem < 1e-12) return 0.5;
    return phi_tilde(rem, y);
}

inline double meander_transition_density(const MeanderState& from, const MeanderState& to) {
    const double s = from.time, x = from.value, t = to.time, y = to.value;
    if (!(t > s)) throw DomainError("meander transition: need s < t");
    if (!(x > 0)) throw DomainError("meander transition: x must be > 0 for s > 0 (use the marginal)");
    if (!(y > 0)) return 0.0;
    const double dt = t - s;
    const double kill = phi(dt, y - x) - phi(dt, y + x);
    return kill * meander_survival_factor(t, y) / meander_survival_factor(s, x);
}

inline double meander_marginal_density(double t, double y) {
    if (!(t > 0 && t <= 1)) throw DomainError("meander marginal: t must lie in (0,1]");
    if (!(y > 0)) return 0.0;
    return 2 * std::sqrt(2 * std::numbers::pi) * (y / t) * phi(t, y) * meander_survival_factor(t, y);
}

inline double meander_marginal_cdf(double t, double y) {
    if (!(y > 0)) return 0.0;
    auto f = [t](double u) { return meander_marginal_density(t, u); };
    // split keeps the Kronrod panels on the bulk of the mass
    const double cut = std::min(y, 12.0 * std::sqrt(t));
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, cut, 15, 1e-14);
    if (y > cut) v += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cut, y, 15, 1e-14);
    return std::min(1.0, v);
}

// One exact step of the meander chain from (s,x) to t > s.
inline double meander_step(double s, double x, double t, RandomStream& rng) {
    const double dt = t - s;
    const double sd = std::sqrt(dt);
    if (x <= 0.0) {
        // from the origin: Rayleigh(sqrt t) proposal thinned by 2*Phi~_{1-t}
        for (;;) {
            const double y = std::sqrt(2 * dt * rng.exponential());
            if (y > 0 && rng.uniform() < 2 * meander_survival_factor(t, y)) return y;
        }
    }
    for (;;) {
        // killed Brownian transition, then the h-transform weight
        const double y = x + sd * rng.normal();
        if (y <= 0) continue;
        if (rng.uniform() >= -std::expm1(-2 * x * y / dt)) continue;
        if (rng.uniform() < 2 * meander_survival_factor(t, y)) return y;
    }
}

inline GridFunction sample_meander(const Grid& grid, RandomStream& rng) {
    if (grid.left() != 0.0 || grid.right() != 1.0) throw DomainError("sample_meander: grid must be [0,1]");
    GridFunction f(grid);
    f[0] = 0.0;
    for (std::size_t i = 1; i < grid.points(); ++i) f[i] = meander_step(grid.x(i - 1), f[i - 1], grid.x(i), rng);
    return f;
}

struct MaxDecomposition {
    double argmax = 0.0;
    double max = 0.0;
    std::size_t argmax_index = 0;
    std::optional<GridFunction> right_meander;  // empty when x_max = 1
    std::optional<GridFunction> left_meander;   // empty when x_max = 0
    bool right_degenerate() const { return !right_meander.has_value(); }
    bool left_degenerate() const { return !left_meander.has_value(); }
};

namespace detail {
inline GridFunction resample_linear(const std::vector<double>& u_native, const std::vector<double>& v_native,
                                    std::size_t steps) {
    Grid g(0.0, 1.0, steps);
    GridFunction out(g);
    std::size_t j = 0;
    for (std::size_t i = 0; i < g.points(); ++i) {
        const double u = g.x(i);
        while (j + 2 < u_native.size() && u_native[j + 1] <= u) ++j;
        const double u0 = u_native[j], u1 = u_native[j + 1];
        const double w = (u1 > u0) ? (u - u0) / (u1 - u0) : 0.0;
        out[i] = (w == 0.0) ? v_native[j] : (w == 1.0 ? v_native[j + 1] : v_native[j] + w * (v_native[j + 1] - v_native[j]));
    }
    return out;
}
}  // namespace detail

// canonical_steps = 0 keeps each side on its native step count (no interpolation).
inline MaxDecomposition decompose_at_max(const GridFunction& path, std::size_t canonical_steps = 0) {
    const Grid& g = path.grid();
    if (g.left() != 0.0 || g.right() != 1.0) throw DomainError("decompose_at_max: path must live on [0,1]");
    if (path[0] != 0.0) throw DomainError("decompose_at_max: path must start at 0");
    std::size_t im = 0;
    for (std::size_t i = 1; i < path.size(); ++i)
        if (path[i] > path[im]) im = i;
    for (std::size_t i = im + 1; i < path.size(); ++i)
        if (path[i] == path[im]) throw DegenerateInput("decompose_at_max: tied maxima");
    MaxDecomposition out;
    out.argmax_index = im;
    out.argmax = g.x(im);
    out.max = path[im];
    const double xm = out.argmax, M = out.max;
    const std::size_t m = g.steps();
    if (im < m) {
        const std::size_t n = m - im;
        const double sc = 1.0 / std::sqrt(1.0 - xm);
        std::vector<double> u(n + 1), v(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            u[j] = (j == n) ? 1.0 : static_cast<double>(j) / static_cast<double>(n);
            v[j] = sc * (M - path[im + j]);
        }
        out.right_meander = canonical_steps == 0 ? GridFunction(Grid(0.0, 1.0, n), v)
                                                 : detail::resample_linear(u, v, canonical_steps);
    }
    if (im > 0) {
        const std::size_t n = im;
        const double sc = 1.0 / std::sqrt(xm);
        std::vector<double> u(n + 1), v(n + 1);
        for (std::size_t j = 0; j <= n; ++j) {
            u[j] = (j == n) ? 1.0 : static_cast<double>(j) / static_cast<double>(n);
            v[j] = sc * (M - path[im - j]);
        }
        out.left_meander = canonical_steps == 0 ? GridFunction(Grid(0.0, 1.0, n), v)
                                                : detail::resample_linear(u, v, canonical_steps);
    }
    return out;
}

// Inverse of decompose_at_max on the native grids.
inline GridFunction reassemble_from_max(const MaxDecomposition& d, const Grid& grid) {
    GridFunction f(grid);
    const std::size_t im = d.argmax_index;
    f[im] = d.max;
    if (d.right_meander) {
        const double sc = std::sqrt(1.0 - d.argmax);
        for (std::size_t j = 1; j < d.right_meander->size(); ++j) f[im + j] = d.max - sc * (*d.right_meander)[j];
    }
    if (d.left_meander) {
        const double sc = std::sqrt(d.argmax);
        for (std::size_t j = 1; j < d.left_meander->size(); ++j) f[im - j] = d.max - sc * (*d.left_meander)[j];
    }
    return f;
}

}  // namespace bgl
