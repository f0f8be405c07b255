#pragma once

#include <bgl/errors.hpp>
#include <bgl/grid.hpp>
#include <bgl/random.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

namespace bgl {

inline GridFunction sample_motion(const Grid& grid, double start_value, RandomStream& rng) {
    GridFunction f(grid);
    const double sd = std::sqrt(grid.h());
    f[0] = start_value;
    for (std::size_t i = 1; i < grid.points(); ++i) f[i] = f[i - 1] + sd * rng.normal();
    return f;
}

// Brownian bridge through arbitrary increasing times with pinned ends, sampled
// by sequential conditioning. times.front()/back() carry a/b.
inline std::vector<double> sample_bridge_at(const std::vector<double>& times, double a, double b,
                                            RandomStream& rng) {
    std::vector<double> v(times.size());
    if (times.empty()) return v;
    v.front() = a;
    const double tend = times.back();
    for (std::size_t i = 1; i + 1 < times.size(); ++i) {
        const double rem = tend - times[i - 1];
        const double dt = times[i] - times[i - 1];
        const double mean = v[i - 1] + (b - v[i - 1]) * dt / rem;
        const double var = dt * (tend - times[i]) / rem;
        v[i] = mean + std::sqrt(var) * rng.normal();
    }
    if (times.size() > 1) v.back() = b;
    return v;
}

inline GridFunction sample_bridge(const Grid& grid, double left_value, double right_value, RandomStream& rng) {
    GridFunction f(grid);
    const std::size_t m = grid.steps();
    f[0] = left_value;
    for (std::size_t i = 1; i < m; ++i) {
        // remaining steps measured in units of h keeps the weights exact
        const double r = static_cast<double>(m - i + 1);
        const double mean = f[i - 1] + (right_value - f[i - 1]) / r;
        const double var = grid.h() * (r - 1) / r;
        f[i] = mean + std::sqrt(var) * rng.normal();
    }
    f[m] = right_value;
    return f;
}

// Fill f on (i0, i1) with a bridge between the existing values f[i0], f[i1].
inline void fill_bridge(GridFunction& f, std::size_t i0, std::size_t i1, RandomStream& rng) {
    const double h = f.grid().h();
    const double b = f[i1];
    for (std::size_t i = i0 + 1; i < i1; ++i) {
        const double r = static_cast<double>(i1 - i + 1);
        const double mean = f[i - 1] + (b - f[i - 1]) / r;
        f[i] = mean + std::sqrt(h * (r - 1) / r) * rng.normal();
    }
}

// f^{[a,b]}: subtract the chord through the endpoint values.
inline GridFunction affine_bridge_part(const GridFunction& f, std::size_t i0, std::size_t i1) {
    GridFunction piece = f.restrict(i0, i1);
    const double fa = f[i0], fb = f[i1];
    const double n = static_cast<double>(i1 - i0);
    for (std::size_t j = 0; j < piece.size(); ++j) {
        const double w = static_cast<double>(j) / n;
        piece[j] = piece[j] - (1 - w) * fa - w * fb;
    }
    piece[0] = 0.0;
    piece[piece.size() - 1] = 0.0;
    return piece;
}

// Supremum of the Brownian interpolation of a grid path: within each cell the maximum of
// the bridge between the two endpoint values is drawn exactly.
inline double bridge_supremum(const GridFunction& f, RandomStream& rng) {
    const double h = f.grid().h();
    double m = f[0];
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double a = f[i], b = f[i + 1];
        const double cell = 0.5 * (a + b + std::sqrt((a - b) * (a - b) - 2 * h * std::log(rng.uniform_open())));
        m = std::max(m, cell);
    }
    return m;
}

inline std::vector<GridFunction> bridge_decompose(const GridFunction& path, const std::vector<double>& knots) {
    const Grid& g = path.grid();
    std::vector<std::size_t> idx{0};
    for (double k : knots) {
        const std::size_t i = g.index_of(k);
        if (i == 0 || i == g.steps()) throw DomainError("bridge_decompose: knot must be interior");
        if (i <= idx.back()) throw DomainError("bridge_decompose: knots must be strictly increasing");
        idx.push_back(i);
    }
    idx.push_back(g.steps());
    std::vector<GridFunction> pieces;
    for (std::size_t j = 0; j + 1 < idx.size(); ++j) pieces.push_back(affine_bridge_part(path, idx[j], idx[j + 1]));
    return pieces;
}

}  // namespace bgl
