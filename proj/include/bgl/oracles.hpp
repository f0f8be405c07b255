#pragma once

// Brute-force references for the jump-ensemble geometry.

#include <bgl/brownian.hpp>
#include <bgl/jump_geometry.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace bgl::oracle {

// Exhaustive subset search; empty when no admissible set exists. n <= 20.
inline std::vector<std::size_t> pole_set(const std::vector<double>& x, double dip) {
    const std::size_t n = x.size();
    std::vector<std::size_t> best;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (!(mask & 1u) || !(mask & (1u << (n - 1)))) continue;
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) s.push_back(i);
        bool ok = true;
        for (std::size_t j = 1; j < s.size() && ok; ++j) ok = x[s[j]] - x[s[j - 1]] >= dip;
        for (std::size_t c = 0; c < n && ok; ++c) {
            double dist = std::numeric_limits<double>::infinity();
            for (std::size_t p : s) dist = std::min(dist, std::abs(x[c] - x[p]));
            ok = dist <= dip;
        }
        if (!ok) continue;
        if (s.size() > best.size() || (s.size() == best.size() && s > best)) best = s;
    }
    return best;
}

// Random side instance with k curves over m steps.
inline SideData random_side(std::size_t k, std::size_t m, RandomStream& rng) {
    SideData s;
    for (std::size_t i = 0; i < k; ++i) {
        auto b = sample_bridge(Grid(0, 1, m), 0, 0, rng);
        s.bridges.push_back(b.values());
        s.outer.push_back(1.5 * double(k - i) + 0.3 * rng.normal());
    }
    s.lower.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) s.lower[j] = -0.5 + 0.5 * rng.normal();
    s.lower[0] = std::min(s.lower[0], s.outer.back() - 0.1);
    return s;
}

}  // namespace bgl::oracle
