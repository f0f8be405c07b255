#pragma once

#include <bgl/errors.hpp>
#include <bgl/grid.hpp>
#include <bgl/lpp.hpp>
#include <bgl/random.hpp>
#include <bgl/stats.hpp>

#include <cmath>
#include <limits>
#include <ostream>
#include <vector>

namespace bgl {

struct Quilt {
    std::vector<GridFunction> fabrics;
    std::vector<double> stitches;
    std::vector<double> shifts;  // shifts[0] == 0
    GridFunction values;
    std::vector<std::size_t> piece;  // fabric index per grid point; a stitch belongs to the left piece

    double continuity_residual() const {
        double r = 0;
        const Grid& g = values.grid();
        for (std::size_t i = 0; i < stitches.size(); ++i) {
            const std::size_t j = g.index_of(stitches[i]);
            r = std::max(r, std::abs((fabrics[i][j] + shifts[i]) - (fabrics[i + 1][j] + shifts[i + 1])));
        }
        return r;
    }

    void write_csv(std::ostream& os) const {
        os << "x,piece,value\n" << std::setprecision(17);
        for (std::size_t i = 0; i < values.size(); ++i) os << values.grid().x(i) << ',' << piece[i] << ',' << values[i] << '\n';
    }
};

inline Quilt build_quilt(std::vector<GridFunction> fabrics, std::vector<double> stitches) {
    if (fabrics.size() != stitches.size() + 1) throw DomainError("quilt: need one more fabric than stitches");
    const Grid& g = fabrics.front().grid();
    for (const auto& f : fabrics)
        if (f.grid() != g) throw GridAlignmentError("quilt: fabrics must share one grid");
    std::vector<std::size_t> idx;
    for (double s : stitches) {
        const std::size_t j = g.index_of(s);
        if (j == 0 || j == g.steps()) throw DomainError("quilt: stitches must be interior");
        if (!idx.empty() && j <= idx.back()) throw DomainError("quilt: stitches must be strictly increasing");
        idx.push_back(j);
    }
    Quilt q;
    q.shifts.assign(fabrics.size(), 0.0);
    for (std::size_t i = 0; i < idx.size(); ++i)
        q.shifts[i + 1] = q.shifts[i] + fabrics[i][idx[i]] - fabrics[i + 1][idx[i]];
    q.values = fabrics.front();
    q.piece.assign(g.points(), 0);
    std::size_t cur = 0;
    for (std::size_t j = 0; j < g.points(); ++j) {
        while (cur < idx.size() && j > idx[cur]) ++cur;
        q.piece[j] = cur;
        if (cur > 0) q.values[j] = fabrics[cur][j] + q.shifts[cur];
    }
    q.fabrics = std::move(fabrics);
    q.stitches = std::move(stitches);
    return q;
}

struct MomentRow {
    double y;
    double moment;
    double stderr_;
    std::size_t samples;
};

struct IncrementMomentReport {
    double eta;
    int n;
    std::vector<MomentRow> rows;
    LinearFit fit;  // log moment against log y
    double target() const { return 1 - eta / 2; }
};

// Environment grid for the experiment: steps of 2n^{2/3} * 0.01 / refine so every y in the
// 0.01 lattice and the origin row start are grid points; the left end sits just below 0.
inline Grid increment_grid(int n, double y_max, int refine = 20) {
    const double h = kpz_width(n) * 0.01 / refine;
    const auto below = static_cast<std::size_t>(std::ceil(n / h));
    const auto above = static_cast<std::size_t>(std::llround(kpz_width(n) * y_max / h));
    return Grid(n - static_cast<double>(below) * h, n + static_cast<double>(above) * h, below + above);
}

// Narrow wedge at the grid point nearest the origin.
inline RewardFunction narrow_wedge(const Environment& env, int n) {
    const Grid rg = reward_grid(env, n);
    GridFunction f(rg, std::vector<double>(rg.points(), -std::numeric_limits<double>::infinity()), true);
    f[env.grid().nearest_index(0.0)] = 0.0;
    return RewardFunction(f, {1.0, 1.0, 1.0});
}

template <class RewardFactory>
IncrementMomentReport increment_moment_experiment(int n, double eta, const std::vector<double>& ys, std::size_t envs,
                                                  std::uint64_t seed, RewardFactory make_reward) {
    if (!(eta > 0 && eta <= 0.5)) throw DomainError("increment moment: eta must lie in (0, 1/2]");
    double ymax = 0;
    for (double y : ys) ymax = std::max(ymax, y);
    const Grid g = increment_grid(n, ymax);
    IncrementMomentReport rep{eta, n, {}, {0, 0, 0, 0}};
    std::vector<std::vector<double>> d(ys.size());
    for (std::size_t e = 0; e < envs; ++e) {
        RandomStream rng(splitmix64(seed ^ 0x51u), e);
        const Environment env = Environment::sample(n + kLineOffset, g, rng, e);
        const RewardFunction f = make_reward(env, n);
        const double w0 = f_rewarded_weight(env, n, f, 0.0);
        for (std::size_t i = 0; i < ys.size(); ++i)
            d[i].push_back(std::pow(std::abs(f_rewarded_weight(env, n, f, ys[i]) - w0), 2 - eta));
    }
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        const double m = mean(d[i]);
        const double se = d[i].size() > 1 ? std::sqrt(variance(d[i]) / double(d[i].size())) : 0.0;
        rep.rows.push_back({ys[i], m, se, d[i].size()});
        if (ys[i] > 0 && m > 0) {
            lx.push_back(std::log(ys[i]));
            ly.push_back(std::log(m));
        }
    }
    if (lx.size() >= 2) rep.fit = linear_fit(lx, ly);
    return rep;
}

}  // namespace bgl
