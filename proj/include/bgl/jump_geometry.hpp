#pragma once

#include <bgl/errors.hpp>
#include <bgl/grid.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace bgl {

// Piecewise-linear function through strictly increasing knots.
struct PiecewiseLinear {
    std::vector<double> xs;
    std::vector<double> ys;

    std::size_t pieces() const { return xs.size() - 1; }
    double slope(std::size_t j) const { return (ys[j + 1] - ys[j]) / (xs[j + 1] - xs[j]); }

    double operator()(double x) const {
        if (xs.size() < 2) throw DomainError("piecewise linear: need two knots");
        if (x < xs.front() || x > xs.back()) throw DomainError("piecewise linear: argument outside the knot range");
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t j = static_cast<std::size_t>(it - xs.begin());
        if (j == xs.size()) return ys.back();
        --j;
        if (x == xs[j]) return ys[j];
        const double w = (x - xs[j]) / (xs[j + 1] - xs[j]);
        return ys[j] + w * (ys[j + 1] - ys[j]);
    }

    bool concave(double tol = 0) const {
        for (std::size_t j = 0; j + 1 < pieces(); ++j)
            if (slope(j + 1) > slope(j) + tol) return false;
        return true;
    }
};

// Least concave majorant of a grid curve on the index window [i0, i1].
struct Majorant {
    Grid grid;
    std::vector<std::size_t> vertices;  // indices into grid, increasing
    std::vector<double> values;         // curve values at the vertices

    double x(std::size_t v) const { return grid.x(vertices[v]); }
    // slope of the segment leaving vertex v to the right
    double slope(std::size_t v) const { return (values[v + 1] - values[v]) / (x(v + 1) - x(v)); }

    double at_index(std::size_t i) const {
        if (i < vertices.front() || i > vertices.back()) throw DomainError("majorant: index outside window");
        auto it = std::lower_bound(vertices.begin(), vertices.end(), i);
        const std::size_t v = static_cast<std::size_t>(it - vertices.begin());
        if (vertices[v] == i) return values[v];
        const double w = static_cast<double>(i - vertices[v - 1]) / static_cast<double>(vertices[v] - vertices[v - 1]);
        return values[v - 1] + w * (values[v] - values[v - 1]);
    }

    PiecewiseLinear as_function() const {
        PiecewiseLinear p;
        for (std::size_t v = 0; v < vertices.size(); ++v) {
            p.xs.push_back(x(v));
            p.ys.push_back(values[v]);
        }
        return p;
    }
};

inline Majorant concave_majorant(const GridFunction& curve, std::size_t i0, std::size_t i1) {
    if (!(i0 < i1) || i1 >= curve.size()) throw DomainError("concave majorant: empty window");
    Majorant m{curve.grid(), {}, {}};
    auto& h = m.vertices;
    // Monotone chain on integer abscissae; collinear middle points are dropped.
    for (std::size_t i = i0; i <= i1; ++i) {
        while (h.size() >= 2) {
            const std::size_t a = h[h.size() - 2], b = h.back();
            const double cross = static_cast<double>(b - a) * (curve[i] - curve[a]) -
                                 (curve[b] - curve[a]) * static_cast<double>(i - a);
            if (cross >= 0) h.pop_back();
            else break;
        }
        h.push_back(i);
    }
    for (std::size_t v : h) m.values.push_back(curve[v]);
    return m;
}

inline Majorant concave_majorant(const GridFunction& curve, double left, double right) {
    return concave_majorant(curve, curve.grid().index_of(left), curve.grid().index_of(right));
}

struct LrPoints {
    std::size_t l_vertex;  // positions in Majorant::vertices
    std::size_t r_vertex;
    double l;
    double r;
};

// l: first vertex whose right slope is <= 4T; r: last vertex whose left slope is >= -4T.
inline LrPoints compute_lr(const Majorant& m, double T) {
    const std::size_t nv = m.vertices.size();
    std::size_t lv = nv - 1;
    for (std::size_t v = 0; v + 1 < nv; ++v)
        if (m.slope(v) <= 4 * T) {
            lv = v;
            break;
        }
    std::size_t rv = 0;
    for (std::size_t v = nv - 1; v > 0; --v)
        if (m.slope(v - 1) >= -4 * T) {
            rv = v;
            break;
        }
    return {lv, rv, m.x(lv), m.x(rv)};
}

namespace detail {

// Consecutive poles a < b are compatible when far enough apart and every
// extreme point strictly between them lies within dip of one of them.
inline bool pole_edge_ok(const std::vector<double>& xs, std::size_t a, std::size_t b, double dip) {
    if (xs[b] - xs[a] < dip) return false;
    for (std::size_t c = a + 1; c < b; ++c)
        if (xs[c] - xs[a] > dip && xs[b] - xs[c] > dip) return false;
    return true;
}

}  // namespace detail

// Indices (into xext) of the pole set: contains both ends, separation >= dip,
// covering within dip; maximal cardinality, then lexicographically maximal.
inline std::vector<std::size_t> pole_set_indices(const std::vector<double>& xext, double dip) {
    if (xext.size() < 2) throw ParameterError("pole set: need l < r");
    for (std::size_t i = 1; i < xext.size(); ++i)
        if (!(xext[i] > xext[i - 1])) throw ParameterError("pole set: extreme points must be strictly increasing");
    const double span = xext.back() - xext.front();
    if (dip < 1 || dip > span) throw ParameterError("pole set: inter-pole distance must lie in [1, r - l]");
    const std::size_t n = xext.size();
    constexpr int none = -1;
    // nxt[i]: first point farther than dip to the right of i; an edge i -> j is valid
    // iff xext[j] - xext[i] >= dip and (j <= nxt[i] or xext[j] - dip <= xext[nxt[i]])
    std::vector<std::size_t> nxt(n, n);
    for (std::size_t i = 0, c = 0; i < n; ++i) {
        c = std::max(c, i + 1);
        while (c < n && !(xext[c] - xext[i] > dip)) ++c;
        nxt[i] = c;
    }
    auto edge_ok = [&](std::size_t i, std::size_t j) {
        if (xext[j] - xext[i] < dip) return false;
        return j <= nxt[i] || xext[j] - dip <= xext[nxt[i]];
    };
    auto beyond = [&](std::size_t i, std::size_t j) { return nxt[i] < n && j > nxt[i] && xext[j] - dip > xext[nxt[i]]; };
    // best[i]: most poles on a valid chain from i to the last point
    std::vector<int> best(n, none);
    best[n - 1] = 1;
    for (std::size_t i = n - 1; i-- > 0;)
        for (std::size_t j = i + 1; j < n && !beyond(i, j); ++j)
            if (best[j] != none && edge_ok(i, j)) best[i] = std::max(best[i], best[j] + 1);
    if (best[0] == none) throw ParameterError("pole set: no admissible pole set exists");
    std::vector<std::size_t> out{0};
    std::size_t cur = 0;
    while (cur != n - 1) {
        std::size_t next = cur;
        for (std::size_t j = cur + 1; j < n && !beyond(cur, j); ++j)
            if (best[j] == best[cur] - 1 && edge_ok(cur, j)) next = j;
        out.push_back(next);
        cur = next;
    }
    return out;
}

inline std::vector<double> pole_set(const std::vector<double>& xext, double l, double r, double dip) {
    if (xext.empty() || xext.front() != l || xext.back() != r) throw ParameterError("pole set: l and r must be the end extreme points");
    std::vector<double> out;
    for (std::size_t i : pole_set_indices(xext, dip)) out.push_back(xext[i]);
    return out;
}

inline PiecewiseLinear tent_map(const std::vector<double>& poles, const GridFunction& lower) {
    if (poles.size() < 2) throw DomainError("tent: need at least two poles");
    PiecewiseLinear t;
    for (double p : poles) {
        t.xs.push_back(p);
        t.ys.push_back(lower.at(p));
    }
    return t;
}

// One side of the reconstruction, laid out from the outer end (index 0, at +-2T)
// to the inner end (index m, at l or r). Weight of the inner value is j/m.
struct SideData {
    std::vector<std::vector<double>> bridges;  // per curve; zero at both ends
    std::vector<double> lower;                 // L(k+1, .) on the side
    std::vector<double> outer;                 // L(i, +-2T)

    std::size_t steps() const { return lower.size() - 1; }
    double weight(std::size_t j) const { return static_cast<double>(j) / static_cast<double>(steps()); }

    // Reconstructed curve i (0-based) given its inner value.
    double rebuilt(std::size_t i, std::size_t j, double inner) const {
        const double w = weight(j);
        return bridges[i][j] + w * inner + (1 - w) * outer[i];
    }
};

// Lowest inner values each curve can take via affine translation before touching
// the curve beneath; built bottom-up. +inf marks a side that no inner value can fix.
inline std::vector<double> corner_vector(const SideData& s) {
    const std::size_t k = s.bridges.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> c(k, inf);
    const std::size_t m = s.steps();
    if (m < 1) throw DomainError("corner: side interval needs at least one step");
    for (std::size_t ii = k; ii-- > 0;) {
        const bool bottom = ii + 1 == k;
        if (!bottom && c[ii + 1] == inf) break;
        const double below0 = bottom ? s.lower[0] : s.outer[ii + 1];
        if (!(s.outer[ii] > below0)) break;
        double best = -inf;
        for (std::size_t j = 1; j <= m; ++j) {
            const double w = s.weight(j);
            const double below = bottom ? s.lower[j] : s.rebuilt(ii + 1, j, c[ii + 1]);
            best = std::max(best, (below - s.bridges[ii][j] - (1 - w) * s.outer[ii]) / w);
        }
        c[ii] = best;
    }
    return c;
}

// X - corner lies in (0, inf)^k with strictly decreasing entries.
inline bool corner_criterion(const std::vector<double>& x, const std::vector<double>& corner) {
    const std::size_t k = x.size();
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        const double delta = x[i] - corner[i];
        if (!(delta < prev)) return false;
        prev = delta;
    }
    return prev > 0;
}

// Direct side-interval test by pointwise reconstruction.
inline bool side_test_direct(const SideData& s, const std::vector<double>& inner) {
    const std::size_t k = s.bridges.size();
    for (std::size_t j = 0; j <= s.steps(); ++j) {
        for (std::size_t i = 0; i + 1 < k; ++i)
            if (!(s.rebuilt(i, j, inner[i]) > s.rebuilt(i + 1, j, inner[i + 1]))) return false;
        if (!(s.rebuilt(k - 1, j, inner[k - 1]) > s.lower[j])) return false;
    }
    return true;
}

}  // namespace bgl
