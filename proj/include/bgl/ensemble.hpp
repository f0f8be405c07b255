#pragma once

#include <bgl/brownian.hpp>
#include <bgl/errors.hpp>
#include <bgl/grid.hpp>
#include <bgl/lpp.hpp>
#include <bgl/random.hpp>
#include <bgl/stats.hpp>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <vector>

namespace bgl {

class LineEnsemble {
public:
    LineEnsemble() = default;

    // pinned_left admits equal values in the first column (Dyson BM started at the origin).
    explicit LineEnsemble(std::vector<GridFunction> curves, bool pinned_left = false)
        : curves_(std::move(curves)), pinned_left_(pinned_left) {
        check_shape();
        if (auto bad = first_violation()) throw OrderingError("line ensemble: curves " + std::to_string(*bad) + " and " +
                                                              std::to_string(*bad + 1) + " are not strictly ordered");
    }

    static LineEnsemble unchecked(std::vector<GridFunction> curves, bool pinned_left = false) {
        LineEnsemble e;
        e.curves_ = std::move(curves);
        e.pinned_left_ = pinned_left;
        e.check_shape();
        return e;
    }

    std::size_t count() const { return curves_.size(); }
    const Grid& grid() const { return curves_.front().grid(); }
    bool pinned_left() const { return pinned_left_; }
    // Curves are labelled 1..k top-down.
    const GridFunction& curve(std::size_t i) const { return curves_.at(i - 1); }
    GridFunction& curve(std::size_t i) { return curves_.at(i - 1); }
    double operator()(std::size_t i, std::size_t idx) const { return curves_[i - 1][idx]; }
    const std::vector<GridFunction>& curves() const { return curves_; }

    bool ordered() const { return !first_violation().has_value(); }

    // Label of the upper curve of the first out-of-order pair, if any.
    std::optional<std::size_t> first_violation() const {
        const std::size_t start = pinned_left_ ? 1 : 0;
        for (std::size_t i = 0; i + 1 < curves_.size(); ++i)
            for (std::size_t j = start; j < curves_[i].size(); ++j)
                if (!(curves_[i][j] > curves_[i + 1][j])) return i + 1;
        return std::nullopt;
    }

    void write_csv(std::ostream& os) const {
        os << "curve,x,value\n" << std::setprecision(17);
        for (std::size_t i = 0; i < curves_.size(); ++i)
            for (std::size_t j = 0; j < curves_[i].size(); ++j) os << i + 1 << ',' << grid().x(j) << ',' << curves_[i][j] << '\n';
    }

private:
    void check_shape() const {
        if (curves_.empty()) throw DomainError("line ensemble: no curves");
        for (const auto& c : curves_)
            if (c.grid() != curves_.front().grid()) throw DomainError("line ensemble: curves must share a grid");
    }

    std::vector<GridFunction> curves_;
    bool pinned_left_ = false;
};

namespace detail {

inline Eigen::MatrixXcd gue_matrix(int n, double variance, RandomStream& rng) {
    Eigen::MatrixXcd a(n, n);
    const double sd = std::sqrt(variance), off = std::sqrt(variance / 2);
    for (int i = 0; i < n; ++i) {
        a(i, i) = sd * rng.normal();
        for (int j = i + 1; j < n; ++j) {
            const std::complex<double> z(off * rng.normal(), off * rng.normal());
            a(i, j) = z;
            a(j, i) = std::conj(z);
        }
    }
    return a;
}

inline Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("hermitian eigen-decomposition failed");
    return es.eigenvalues();  // ascending
}

}  // namespace detail

// Largest eigenvalue of an n x n GUE matrix with diagonal variance `variance`.
inline double gue_top(int n, double variance, RandomStream& rng) {
    if (n < 1) throw DomainError("gue_top: n must be >= 1");
    const auto ev = detail::hermitian_eigenvalues(detail::gue_matrix(n, variance, rng));
    return ev[n - 1];
}

// Eigenvalue paths of Hermitian Brownian motion started from 0 at time 0, on a grid
// inside [0, inf). A grid starting after 0 begins from the exact GUE marginal.
inline LineEnsemble dyson_bm(int n, const Grid& grid, RandomStream& rng) {
    if (n < 1) throw DomainError("dyson_bm: n must be >= 1");
    if (grid.left() < 0) throw DomainError("dyson_bm: grid must lie in [0, inf)");
    const std::size_t np = grid.points();
    std::vector<std::vector<double>> vals(n, std::vector<double>(np));
    Eigen::MatrixXcd h = grid.left() > 0 ? detail::gue_matrix(n, grid.left(), rng) : Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t j = 0; j < np; ++j) {
        if (j > 0) h += detail::gue_matrix(n, grid.x(j) - grid.x(j - 1), rng);
        const auto ev = detail::hermitian_eigenvalues(h);
        for (int i = 0; i < n; ++i) vals[i][j] = ev[n - 1 - i];
    }
    std::vector<GridFunction> curves;
    for (auto& v : vals) curves.emplace_back(grid, std::move(v));
    const bool pinned = grid.left() == 0.0;
    auto e = LineEnsemble::unchecked(std::move(curves), pinned);
    if (!e.ordered()) throw OrderingError("dyson_bm: coincident eigenvalues off the origin");
    return e;
}

// y-grid image of the Dyson time grid under t = n + 2n^{2/3} y.
inline Grid scaled_grid(const Grid& time_grid, int n) {
    const double w = kpz_width(n);
    return Grid((time_grid.left() - n) / w, (time_grid.right() - n) / w, time_grid.steps());
}

inline LineEnsemble scaled_ensemble(const LineEnsemble& dyson, int n) {
    if (n < 1) throw DomainError("scaled_ensemble: n must be >= 1");
    const Grid tg = dyson.grid();
    const Grid yg = scaled_grid(tg, n);
    const double c = 1.0 / (std::numbers::sqrt2 * std::cbrt(static_cast<double>(n)));
    std::vector<GridFunction> out;
    for (std::size_t i = 1; i <= dyson.count(); ++i) {
        GridFunction f(yg);
        for (std::size_t j = 0; j < tg.points(); ++j) {
            const double t = tg.x(j);
            f[j] = c * (dyson(i, j) - n - t);  // 2n + 2n^{2/3} y = n + t
        }
        out.push_back(std::move(f));
    }
    return LineEnsemble::unchecked(std::move(out), dyson.pinned_left());
}

// Restriction to the y-window [y0, y1]; both ends must be points of the scaled grid.
inline LineEnsemble scaled_ensemble(const LineEnsemble& dyson, int n, double y0, double y1) {
    const Grid yg = scaled_grid(dyson.grid(), n);
    if (y0 < yg.left() - 1e-12 || y1 > yg.right() + 1e-12) throw DomainError("scaled_ensemble: window exceeds the horizon");
    const std::size_t i0 = yg.index_of(y0), i1 = yg.index_of(y1);
    const LineEnsemble full = scaled_ensemble(dyson, n);
    std::vector<GridFunction> out;
    for (const auto& c : full.curves()) out.push_back(c.restrict(i0, i1));
    return LineEnsemble::unchecked(std::move(out), full.pinned_left() && i0 == 0);
}

// L(i, x + y) - l(x + y, y) on the translated grid.
inline LineEnsemble parabolic_shift(const LineEnsemble& e, double y) {
    if (!std::isfinite(y)) throw DomainError("parabolic_shift: shift must be finite");
    const Grid& g = e.grid();
    if (y == 0.0) return e;
    const Grid out_grid(g.left() - y, g.right() - y, g.steps());
    if (!(out_grid.left() < out_grid.right())) throw DomainError("parabolic_shift: domain overflow");
    std::vector<GridFunction> out;
    for (const auto& c : e.curves()) {
        GridFunction f(out_grid);
        for (std::size_t j = 0; j < g.points(); ++j) f[j] = c[j] - tangent_l(g.x(j), y);
        out.push_back(std::move(f));
    }
    return LineEnsemble::unchecked(std::move(out), e.pinned_left());
}

struct RegularityCell {
    double z;
    double s;
    TailEstimate lower;  // P(L(1,z) + Q(z) <= -s)
    TailEstimate upper;  // P(L(1,z) + Q(z) >= s)
    double envelope;     // C exp(-c s^{3/2})
    bool lower_ok;
    bool upper_ok;
};

struct RegularityReport {
    double c;
    double C;
    std::vector<RegularityCell> cells;
    bool all_ok() const {
        for (const auto& x : cells)
            if (!x.lower_ok || !x.upper_ok) return false;
        return true;
    }
};

// A cell fails only when the Wilson interval lies wholly above the envelope.
inline RegularityReport regular_tail_check(const std::vector<LineEnsemble>& draws, int n, double c, double C,
                                           const std::vector<double>& zs, const std::vector<double>& ss = {1, 2, 3}) {
    if (!(c > 0 && C > 0)) throw DomainError("regular_tail_check: constants must be positive");
    for (double s : ss)
        if (s < 1) throw DomainError("regular_tail_check: s must lie in [1, inf)");
    const double zmax = c * std::pow(static_cast<double>(n), 1.0 / 9.0);
    RegularityReport rep{c, C, {}};
    for (double z : zs) {
        if (std::abs(z) > zmax) throw DomainError("regular_tail_check: |z| exceeds c n^{1/9}");
        std::vector<double> v;
        for (const auto& e : draws) v.push_back(e.curve(1).at(z) + parabola_q(z));
        for (double s : ss) {
            std::size_t lo = 0, hi = 0;
            for (double x : v) {
                lo += x <= -s;
                hi += x >= s;
            }
            RegularityCell cell{z, s, TailEstimate::make(-s, lo, v.size()), TailEstimate::make(s, hi, v.size()),
                                C * std::exp(-c * std::pow(s, 1.5)), true, true};
            cell.lower_ok = cell.lower.ci.lower <= cell.envelope;
            cell.upper_ok = cell.upper.ci.lower <= cell.envelope;
            rep.cells.push_back(cell);
        }
    }
    return rep;
}

struct GibbsTelemetry {
    std::size_t attempts = 0;
    bool accepted = false;
    double wall_seconds = 0;
    nlohmann::json to_json() const { return {{"attempts", attempts}, {"accepted", accepted}, {"wall_time", wall_seconds}}; }
};

struct GibbsResult {
    LineEnsemble ensemble;
    GibbsTelemetry telemetry;
};

// Resample curves 1..k on the index window [ia, ib]. k equal to the curve count
// means no lower curve.
inline GibbsResult gibbs_resample(const LineEnsemble& e, std::size_t k, std::size_t ia, std::size_t ib,
                                  RandomStream& rng, std::size_t max_attempts) {
    if (k < 1 || k > e.count()) throw DomainError("gibbs_resample: k out of range");
    const Grid& g = e.grid();
    if (!(ia < ib) || ib > g.steps()) throw DomainError("gibbs_resample: invalid window");
    const auto t0 = std::chrono::steady_clock::now();
    const Grid wg = g.sub(ia, ib);
    const GridFunction* lower = k < e.count() ? &e.curve(k + 1) : nullptr;
    GibbsTelemetry tel;
    std::vector<GridFunction> prop(k);
    while (tel.attempts < max_attempts) {
        ++tel.attempts;
        for (std::size_t i = 0; i < k; ++i) prop[i] = sample_bridge(wg, e(i + 1, ia), e(i + 1, ib), rng);
        bool ok = true;
        for (std::size_t j = 0; j <= wg.steps() && ok; ++j) {
            for (std::size_t i = 0; i + 1 < k && ok; ++i) ok = prop[i][j] > prop[i + 1][j];
            if (ok && lower) ok = prop[k - 1][j] > (*lower)[ia + j];
        }
        if (!ok) continue;
        tel.accepted = true;
        std::vector<GridFunction> curves = e.curves();
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 1; j < wg.steps(); ++j) curves[i][ia + j] = prop[i][j];
        tel.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return {LineEnsemble::unchecked(std::move(curves), e.pinned_left()), tel};
    }
    throw BudgetExhausted("gibbs_resample: rejection budget exhausted", tel.attempts);
}

// Parabolic surrogate: curve i is -x^2/sqrt2 + offset_i + S_i(x) with S_i a stationary
// Ornstein-Uhlenbeck process of unit variance and unit local rate. Crossing draws are rejected.
inline LineEnsemble parabolic_ou_ensemble(const Grid& grid, const std::vector<double>& offsets, RandomStream& rng,
                                          std::size_t max_attempts = 1000) {
    if (offsets.empty()) throw DomainError("surrogate ensemble: no curves");
    const double theta = 0.5;
    const double a = std::exp(-theta * grid.h());
    const double b = std::sqrt(-std::expm1(-2 * theta * grid.h()));
    for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
        std::vector<GridFunction> curves;
        for (double mu : offsets) {
            GridFunction f(grid);
            double s = rng.normal();
            for (std::size_t j = 0; j < grid.points(); ++j) {
                if (j > 0) s = a * s + b * rng.normal();
                const double x = grid.x(j);
                f[j] = -parabola_q(x) + mu + s;
            }
            curves.push_back(std::move(f));
        }
        auto e = LineEnsemble::unchecked(std::move(curves));
        if (e.ordered()) return e;
    }
    throw BudgetExhausted("surrogate ensemble: curves kept crossing", max_attempts);
}

}  // namespace bgl
