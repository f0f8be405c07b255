#pragma once

#include <bgl/brownian.hpp>
#include <bgl/ensemble.hpp>
#include <bgl/errors.hpp>
#include <bgl/gaussian.hpp>
#include <bgl/grid.hpp>
#include <bgl/jump_geometry.hpp>
#include <bgl/jump_params.hpp>
#include <bgl/random.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

namespace bgl {

// Grid on [-2T, 2T] with +-T at indices steps/4 and 3 steps/4.
inline Grid jump_grid(double T, double h_target = 0.25) {
    const auto q = static_cast<std::size_t>(std::ceil(T / h_target));
    return Grid(-2 * T, 2 * T, 4 * q);
}

struct FavFlags {
    bool f1 = false, f2 = false, f3 = false;
    bool fav() const { return f1 && f2 && f3; }
};

struct JumpData {
    JumpParams params;
    Grid grid;
    std::size_t i_minus_t = 0, i_plus_t = 0;  // indices of -T and T
    std::size_t il = 0, ir = 0;
    double l = 0, r = 0;
    Majorant majorant;
    std::vector<double> xext;
    std::vector<std::size_t> pole_index;  // grid indices
    std::vector<double> poles;
    PiecewiseLinear tent;
    SideData left, right;  // right side runs from 2T inward
    std::vector<double> corner_l, corner_r;
    FavFlags fav;
    GridFunction lower;                // L(k+1, .)
    std::vector<GridFunction> top;     // L(1..k, .)

    int k() const { return params.k; }
    bool has_poles() const { return poles.size() >= 2; }
    Grid middle_grid() const { return grid.sub(il, ir); }
};

inline FavFlags fav_check(const JumpData& jd) {
    const double T = jd.params.T, T2 = T * T;
    const double lo = T2 * (-2 * std::numbers::sqrt2 - 1), hi = T2 * (-2 * std::numbers::sqrt2 + 1);
    FavFlags f;
    f.f1 = true;
    for (const auto& c : jd.top) {
        const double a = c[0], b = c[c.size() - 1];
        if (!(a >= lo && a <= hi && b >= lo && b <= hi)) f.f1 = false;
    }
    f.f2 = true;
    for (std::size_t i = jd.i_minus_t; i <= jd.i_plus_t; ++i)
        if (std::abs(jd.lower[i]) > T2) f.f2 = false;
    f.f3 = true;
    for (const auto* v : {&jd.corner_l, &jd.corner_r})
        for (double c : *v)
            if (!(c >= -T2 && c <= T2)) f.f3 = false;
    return f;
}

// Everything the candidate may depend on: the lower curve, the endpoint values and
// the side bridges of the top k curves.
inline JumpData build_jump_data(const LineEnsemble& e, const JumpParams& p) {
    const std::size_t k = static_cast<std::size_t>(p.k);
    if (e.count() < k + 1) throw DomainError("jump data: ensemble needs k+1 curves");
    const Grid& g = e.grid();
    const double T = p.T;
    const double tol = 1e-9 * std::max(1.0, T);
    if (std::abs(g.left() + 2 * T) > tol || std::abs(g.right() - 2 * T) > tol || g.steps() % 4 != 0)
        throw GridAlignmentError("jump data: ensemble grid must be [-2T, 2T] with steps divisible by 4");
    JumpData jd;
    jd.params = p;
    jd.grid = g;
    const std::size_t N = g.steps();
    jd.i_minus_t = N / 4;
    jd.i_plus_t = 3 * N / 4;
    jd.lower = e.curve(k + 1);
    for (std::size_t i = 1; i <= k; ++i) jd.top.push_back(e.curve(i));

    jd.majorant = concave_majorant(jd.lower, jd.i_minus_t, jd.i_plus_t);
    const LrPoints lr = compute_lr(jd.majorant, T);
    jd.il = jd.majorant.vertices[lr.l_vertex];
    jd.ir = jd.majorant.vertices[lr.r_vertex];
    jd.l = g.x(jd.il);
    jd.r = g.x(jd.ir);
    for (std::size_t v = lr.l_vertex; v <= lr.r_vertex; ++v) jd.xext.push_back(jd.majorant.x(v));

    auto side = [&](bool is_left) {
        SideData s;
        const std::size_t m = is_left ? jd.il : N - jd.ir;
        auto at = [&](std::size_t j) { return is_left ? j : N - j; };
        s.lower.resize(m + 1);
        for (std::size_t j = 0; j <= m; ++j) s.lower[j] = jd.lower[at(j)];
        for (std::size_t i = 0; i < k; ++i) {
            const auto& c = jd.top[i];
            const double outer = c[at(0)], inner = c[at(m)];
            std::vector<double> b(m + 1);
            for (std::size_t j = 0; j <= m; ++j) {
                const double w = static_cast<double>(j) / static_cast<double>(m);
                b[j] = c[at(j)] - (1 - w) * outer - w * inner;
            }
            b[0] = 0.0;
            b[m] = 0.0;
            s.bridges.push_back(std::move(b));
            s.outer.push_back(outer);
        }
        return s;
    };
    if (jd.il > 0) {
        jd.left = side(true);
        jd.corner_l = corner_vector(jd.left);
    } else {
        jd.corner_l.assign(k, std::numeric_limits<double>::infinity());
    }
    if (jd.ir < N) {
        jd.right = side(false);
        jd.corner_r = corner_vector(jd.right);
    } else {
        jd.corner_r.assign(k, std::numeric_limits<double>::infinity());
    }
    jd.fav = fav_check(jd);

    if (jd.r - jd.l >= p.d_ip) {
        for (std::size_t pi : pole_set_indices(jd.xext, p.d_ip)) {
            jd.poles.push_back(jd.xext[pi]);
            jd.pole_index.push_back(jd.majorant.vertices[lr.l_vertex + pi]);
        }
        jd.tent.xs = jd.poles;
        for (std::size_t pi : jd.pole_index) jd.tent.ys.push_back(jd.lower[pi]);
    }
    return jd;
}

struct Candidate {
    std::vector<GridFunction> curves;  // on the middle grid [l, r]
    std::size_t attempts = 0;
};

// Conditions (i) and (ii): corner criterion at l and r, and every curve at or above
// the lower curve at every pole.
inline bool candidate_conditioning_holds(const std::vector<GridFunction>& J, const JumpData& jd) {
    const std::size_t k = J.size();
    std::vector<double> xl(k), xr(k);
    for (std::size_t i = 0; i < k; ++i) {
        xl[i] = J[i][0];
        xr[i] = J[i][J[i].size() - 1];
        for (std::size_t pi : jd.pole_index)
            if (!(J[i][pi - jd.il] >= jd.lower[pi])) return false;
    }
    return corner_criterion(xl, jd.corner_l) && corner_criterion(xr, jd.corner_r);
}

// L^{re,X} on [-2T, 2T]; curve k+1 is the retained lower curve.
inline LineEnsemble reconstruct(const std::vector<GridFunction>& X, const JumpData& jd) {
    const std::size_t k = jd.top.size();
    if (X.size() != k) throw DomainError("reconstruct: candidate has the wrong number of curves");
    const Grid mg = jd.middle_grid();
    for (const auto& x : X)
        if (x.grid() != mg) throw GridAlignmentError("reconstruct: candidate must live on the grid of [l, r]");
    const std::size_t N = jd.grid.steps();
    std::vector<GridFunction> out;
    for (std::size_t i = 0; i < k; ++i) {
        const GridFunction& L = jd.top[i];
        GridFunction f(jd.grid);
        const double dl = X[i][0] - L[jd.il];
        const double dr = X[i][X[i].size() - 1] - L[jd.ir];
        for (std::size_t j = 0; j < jd.il; ++j) f[j] = L[j] + (static_cast<double>(j) / static_cast<double>(jd.il)) * dl;
        for (std::size_t j = jd.il; j <= jd.ir; ++j) f[j] = X[i][j - jd.il];
        for (std::size_t j = jd.ir + 1; j <= N; ++j)
            f[j] = L[j] + (static_cast<double>(N - j) / static_cast<double>(N - jd.ir)) * dr;
        out.push_back(std::move(f));
    }
    out.push_back(jd.lower);
    return LineEnsemble::unchecked(std::move(out));
}

// Largest gap between the side formula evaluated at l or r and the candidate value there.
inline double reconstruction_continuity_residual(const std::vector<GridFunction>& X, const JumpData& jd) {
    double res = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        const GridFunction& L = jd.top[i];
        const double xl = X[i][0], xr = X[i][X[i].size() - 1];
        const double w = 1.0;
        res = std::max(res, std::abs(L[jd.il] + w * (xl - L[jd.il]) - xl));
        res = std::max(res, std::abs(L[jd.ir] + w * (xr - L[jd.ir]) - xr));
    }
    return res;
}

// Strict ordering of the reconstruction and strict domination of the lower curve on [-2T, 2T].
inline bool pass_test(const std::vector<GridFunction>& X, const JumpData& jd) { return reconstruct(X, jd).ordered(); }

namespace detail {

inline double log_phi_diff(double a, double b) {
    if (!(b > a)) return -std::numeric_limits<double>::infinity();
    if (a >= 0) {
        const double la = log_normal_sf(a), lb = log_normal_sf(b);
        return la + std::log1p(-std::exp(lb - la));
    }
    if (b <= 0) {
        const double la = log_normal_sf(-b), lb = log_normal_sf(-a);
        return la + std::log1p(-std::exp(lb - la));
    }
    return std::log(1 - normal_sf(b) - normal_sf(-a));
}

inline double logsumexp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Sample from density proportional to exp(kappa * u) on [0, w].
inline double truncated_exponential(double kappa, double w, RandomStream& rng) {
    const double u = rng.uniform_open();
    if (std::abs(kappa * w) < 1e-12) return u * w;
    if (kappa < 0) return std::log1p(u * std::expm1(kappa * w)) / kappa;
    return w - std::log1p(u * std::expm1(-kappa * w)) / (-kappa);
}

// Least concave majorant of arbitrary points (x increasing), evaluated at the same abscissae.
inline std::vector<double> concave_envelope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::size_t> h;
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (h.size() >= 2) {
            const std::size_t a = h[h.size() - 2], b = h.back();
            const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
            if (cross >= 0) h.pop_back();
            else break;
        }
        h.push_back(i);
    }
    std::vector<double> out(x.size());
    std::size_t s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        while (s + 1 < h.size() && h[s + 1] <= i) ++s;
        if (h[s] == i || s + 1 >= h.size()) {
            out[i] = y[h[s]];
            continue;
        }
        const double w = (x[i] - x[h[s]]) / (x[h[s + 1]] - x[h[s]]);
        out[i] = y[h[s]] + w * (y[h[s + 1]] - y[h[s]]);
    }
    return out;
}

}  // namespace detail

// Values at the poles of one Brownian bridge from (t_start, a) to (t_end, b), conditioned
// to lie above given floors. Backward messages are tabulated on per-node value grids and
// treated as piecewise log-linear; the Gaussian transition is integrated exactly against them.
class PoleChainFilter {
public:
    PoleChainFilter(std::vector<double> t, std::vector<double> floors, double t_start, double a, double t_end,
                    double b, int q = 64, double span = 10.0)
        : t_(std::move(t)), lb_(std::move(floors)), t0_(t_start), a_(a), t1_(t_end), b_(b), q_(q), span_(span) {
        if (t_.empty() || t_.size() != lb_.size()) throw DomainError("pole filter: need matching nodes and floors");
        if (q_ < 4) throw DomainError("pole filter: value grid too small");
        if (!(t_.front() > t0_ && t_.back() < t1_)) throw DomainError("pole filter: nodes must be interior");
        for (std::size_t j = 1; j < t_.size(); ++j)
            if (!(t_[j] > t_[j - 1])) throw DomainError("pole filter: nodes must increase");
        build();
    }

    std::size_t nodes() const { return t_.size(); }
    double span() const { return span_; }

    // One exact draw from the tabulated model. Returns nullopt if the value grids
    // turned out too narrow; the caller widens and retries.
    std::optional<std::vector<double>> draw(RandomStream& rng) const {
        const std::size_t m = t_.size();
        std::vector<double> x(m);
        double prev = a_;
        double prev_t = t0_;
        for (std::size_t j = 0; j < m; ++j) {
            const double dt = t_[j] - prev_t;
            std::vector<double> lm(static_cast<std::size_t>(q_ - 1));
            for (int r = 0; r + 1 < q_; ++r) lm[static_cast<std::size_t>(r)] = cell_log_mass(j, r, prev, dt);
            const double tot = detail::logsumexp(lm);
            if (!std::isfinite(tot)) throw NumericalError("pole filter: no admissible mass at a node");
            if (std::exp(lm.back() - tot) > 1e-9) return std::nullopt;
            if (lo_[j] > lb_[j] && std::exp(lm.front() - tot) > 1e-9) return std::nullopt;
            double u = rng.uniform() , acc = 0;
            int cell = q_ - 2;
            for (int r = 0; r + 1 < q_; ++r) {
                acc += std::exp(lm[static_cast<std::size_t>(r)] - tot);
                if (u < acc) {
                    cell = r;
                    break;
                }
            }
            x[j] = sample_in_cell(j, cell, prev, dt, rng);
            prev = x[j];
            prev_t = t_[j];
        }
        return x;
    }

private:
    double grid_value(std::size_t j, int r) const { return lo_[j] + r * step_[j]; }

    // log of the integral over cell r of node j of phi_dt(y - x) * beta_j(y)
    double cell_log_mass(std::size_t j, int r, double x, double dt) const {
        const auto& L = logbeta_[j];
        const double g0 = grid_value(j, r), g1 = g0 + step_[j];
        const double l0 = L[static_cast<std::size_t>(r)], l1 = L[static_cast<std::size_t>(r) + 1];
        if (!std::isfinite(l0) || !std::isfinite(l1)) return -std::numeric_limits<double>::infinity();
        const double gam = (l1 - l0) / step_[j];
        const double sd = std::sqrt(dt);
        const double mu = x + gam * dt;
        return l0 + gam * (x - g0) + 0.5 * gam * gam * dt + detail::log_phi_diff((g0 - mu) / sd, (g1 - mu) / sd);
    }

    double sample_in_cell(std::size_t j, int r, double x, double dt, RandomStream& rng) const {
        const auto& L = logbeta_[j];
        const double g0 = grid_value(j, r), w = step_[j];
        const double gam = (L[static_cast<std::size_t>(r) + 1] - L[static_cast<std::size_t>(r)]) / w;
        const double c = g0 + 0.5 * w;
        // tangent of the concave log-density at the midpoint dominates it
        const double kappa = gam - (c - x) / dt;
        for (;;) {
            const double u = detail::truncated_exponential(kappa, w, rng);
            const double y = g0 + u;
            if (rng.uniform() < std::exp(-(y - c) * (y - c) / (2 * dt))) return y;
        }
    }

    void build() {
        const std::size_t m = t_.size();
        std::vector<double> xs{t0_}, ys{a_};
        for (std::size_t j = 0; j < m; ++j) {
            xs.push_back(t_[j]);
            ys.push_back(lb_[j]);
        }
        xs.push_back(t1_);
        ys.push_back(b_);
        const auto spine = detail::concave_envelope(xs, ys);
        lo_.resize(m);
        step_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            const double dl = t_[j] - (j ? t_[j - 1] : t0_);
            const double dr = (j + 1 < m ? t_[j + 1] : t1_) - t_[j];
            const double s = std::sqrt(dl * dr / (dl + dr));
            const double centre = std::max(lb_[j], spine[j + 1]);
            lo_[j] = std::max(lb_[j], centre - span_ * s);
            step_[j] = (centre + span_ * s - lo_[j]) / (q_ - 1);
        }
        logbeta_.assign(m, std::vector<double>(static_cast<std::size_t>(q_)));
        {
            const double dt = t1_ - t_[m - 1];
            for (int r = 0; r < q_; ++r) {
                const double y = grid_value(m - 1, r);
                logbeta_[m - 1][static_cast<std::size_t>(r)] = -(b_ - y) * (b_ - y) / (2 * dt);
            }
        }
        std::vector<double> terms(static_cast<std::size_t>(q_ - 1));
        for (std::size_t j = m - 1; j-- > 0;) {
            const double dt = t_[j + 1] - t_[j];
            for (int r = 0; r < q_; ++r) {
                const double x = grid_value(j, r);
                for (int c = 0; c + 1 < q_; ++c) terms[static_cast<std::size_t>(c)] = cell_log_mass(j + 1, c, x, dt);
                logbeta_[j][static_cast<std::size_t>(r)] = detail::logsumexp(terms);
            }
            // keep magnitudes tame; constants cancel in every normalisation
            const double shift = *std::max_element(logbeta_[j].begin(), logbeta_[j].end());
            if (std::isfinite(shift))
                for (double& v : logbeta_[j]) v -= shift;
        }
    }

    std::vector<double> t_, lb_;
    double t0_, a_, t1_, b_;
    int q_;
    double span_;
    std::vector<double> lo_, step_;
    std::vector<std::vector<double>> logbeta_;
};

enum class SamplerKind { filter, naive };

class JumpSampler {
public:
    explicit JumpSampler(const JumpData& jd, SamplerKind kind = SamplerKind::filter, int q = 64)
        : jd_(&jd), kind_(kind), q_(q) {
        if (!jd.has_poles()) throw ParameterError("jump sampler: pole set is empty");
        if (kind_ == SamplerKind::filter) {
            for (std::size_t i = 0; i < jd.top.size(); ++i) filters_.push_back(make_filter(i, 10.0));
        }
    }

    // Draw a candidate J; rejection budget counts proposals.
    Candidate sample(RandomStream& rng, std::size_t max_attempts = 1000000) {
        return kind_ == SamplerKind::filter ? sample_filter(rng, max_attempts) : sample_naive(rng, max_attempts);
    }

private:
    PoleChainFilter make_filter(std::size_t i, double span) const {
        const JumpData& jd = *jd_;
        std::vector<double> t, lb;
        for (std::size_t n = 0; n < jd.pole_index.size(); ++n) {
            const std::size_t pi = jd.pole_index[n];
            double f = jd.lower[pi];
            if (n == 0) f = std::max(f, jd.corner_l[i]);
            if (n + 1 == jd.pole_index.size()) f = std::max(f, jd.corner_r[i]);
            t.push_back(jd.grid.x(pi));
            lb.push_back(f);
        }
        const auto& c = jd.top[i];
        return PoleChainFilter(t, lb, jd.grid.left(), c[0], jd.grid.right(), c[c.size() - 1], q_, span);
    }

    std::vector<double> draw_nodes(std::size_t i, RandomStream& rng) {
        for (int widen = 0; widen < 6; ++widen) {
            if (auto v = filters_[i].draw(rng)) return *v;
            filters_[i] = make_filter(i, filters_[i].span() * 2);
        }
        throw NumericalError("jump sampler: value grids could not be widened enough");
    }

    Candidate sample_filter(RandomStream& rng, std::size_t max_attempts) {
        const JumpData& jd = *jd_;
        const std::size_t k = jd.top.size();
        Candidate cand;
        std::vector<std::vector<double>> nodes(k);
        while (cand.attempts < max_attempts) {
            ++cand.attempts;
            std::vector<double> xl(k), xr(k);
            for (std::size_t i = 0; i < k; ++i) {
                nodes[i] = draw_nodes(i, rng);
                xl[i] = nodes[i].front();
                xr[i] = nodes[i].back();
            }
            if (!corner_criterion(xl, jd.corner_l) || !corner_criterion(xr, jd.corner_r)) continue;
            const Grid mg = jd.middle_grid();
            for (std::size_t i = 0; i < k; ++i) {
                GridFunction f(mg);
                for (std::size_t n = 0; n < jd.pole_index.size(); ++n) f[jd.pole_index[n] - jd.il] = nodes[i][n];
                for (std::size_t n = 0; n + 1 < jd.pole_index.size(); ++n)
                    fill_bridge(f, jd.pole_index[n] - jd.il, jd.pole_index[n + 1] - jd.il, rng);
                cand.curves.push_back(std::move(f));
            }
            return cand;
        }
        throw BudgetExhausted("jump sampler: rejection budget exhausted", cand.attempts);
    }

    Candidate sample_naive(RandomStream& rng, std::size_t max_attempts) {
        const JumpData& jd = *jd_;
        const std::size_t k = jd.top.size();
        Candidate cand;
        while (cand.attempts < max_attempts) {
            ++cand.attempts;
            std::vector<GridFunction> full;
            for (std::size_t i = 0; i < k; ++i) {
                const auto& c = jd.top[i];
                full.push_back(sample_bridge(jd.grid, c[0], c[c.size() - 1], rng));
            }
            std::vector<GridFunction> mid;
            for (const auto& f : full) mid.push_back(f.restrict(jd.il, jd.ir));
            if (!candidate_conditioning_holds(mid, jd)) continue;
            cand.curves = std::move(mid);
            return cand;
        }
        throw BudgetExhausted("jump sampler: rejection budget exhausted", cand.attempts);
    }

    const JumpData* jd_;
    SamplerKind kind_;
    int q_;
    std::vector<PoleChainFilter> filters_;
};

// Values of a grid path at arbitrary abscissae. Linear interpolation by default; with a
// stream, points inside a grid cell are drawn from the Brownian bridge across that cell.
inline std::vector<double> values_at(const GridFunction& f, const std::vector<double>& xs, RandomStream* rng = nullptr) {
    const Grid& g = f.grid();
    std::vector<double> out(xs.size());
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::size_t n = 0;
    while (n < order.size()) {
        const double x = xs[order[n]];
        if (x < g.left() || x > g.right()) throw DomainError("values_at: abscissa outside the path domain");
        if (g.contains_point(x)) {
            out[order[n]] = f[g.index_of(x)];
            ++n;
            continue;
        }
        const std::size_t i = static_cast<std::size_t>(std::floor((x - g.left()) / g.h()));
        const double t0 = g.x(i), t1 = g.x(i + 1);
        std::vector<std::size_t> group;
        while (n < order.size() && xs[order[n]] < t1 && !g.contains_point(xs[order[n]])) group.push_back(order[n++]);
        if (rng) {
            std::vector<double> times{t0};
            for (std::size_t gi : group) times.push_back(xs[gi]);
            times.push_back(t1);
            const auto v = sample_bridge_at(times, f[i], f[i + 1], *rng);
            for (std::size_t q = 0; q < group.size(); ++q) out[group[q]] = v[q + 1];
        } else {
            for (std::size_t gi : group) {
                const double w = (xs[gi] - t0) / (t1 - t0);
                out[gi] = f[i] + w * (f[i + 1] - f[i]);
            }
        }
    }
    return out;
}

struct Observables {
    bool pole_case = false;
    double p = std::numeric_limits<double>::quiet_NaN();
    double y = 0, z = 0;
    double u = std::numeric_limits<double>::quiet_NaN();
    double w_eta = std::numeric_limits<double>::quiet_NaN();
};

// Pole in [-2d, 2d], if any (at most one when d_ip = 5d).
inline std::optional<double> central_pole(const std::vector<double>& poles, double d) {
    for (double p : poles)
        if (p >= -2 * d && p <= 2 * d) return p;
    return std::nullopt;
}

// Deviations of the k-th candidate curve from Tent.
inline Observables observables(const GridFunction& Jk, const JumpData& jd, double d, double eta,
                               RandomStream* rng = nullptr) {
    if (!(eta > 0 && eta < d)) throw DomainError("observables: need 0 < eta < d");
    Observables o;
    const auto p = central_pole(jd.poles, d);
    if (p) {
        o.pole_case = true;
        o.p = *p;
        const std::vector<double> xs{*p - 4 * d, *p, *p + 4 * d, *p + 4 * d + eta};
        const auto v = values_at(Jk, xs, rng);
        o.y = v[0] - jd.tent(xs[0]);
        o.u = v[1] - jd.tent(xs[1]);
        o.z = v[2] - jd.tent(xs[2]);
        o.w_eta = v[3] - jd.tent(xs[3]);
    } else {
        const std::vector<double> xs{-d, d};
        const auto v = values_at(Jk, xs, rng);
        o.y = v[0] - jd.tent(-d);
        o.z = v[1] - jd.tent(d);
    }
    return o;
}

inline bool in_good_region_1(double y, double z, double R, double T) {
    const double lo = -R * std::pow(T, 1.5), hi = R * T * T;
    return y > lo && y < hi && z > lo && z < hi && std::abs(y - z) < 2 * R * std::pow(T, 1.5);
}

inline bool in_good_region_2(double y, double z, double R, double T) {
    const double b = R * T * T;
    return y > -b && y < b && z > -b && z < b && std::abs(y - z) < 2 * R * std::pow(T, 1.5);
}

struct Costs {
    double V;
    double S;
};

inline Costs vault_slope_costs(double y, double z, double d, double tent_left, double tent_p, double tent_right) {
    if (!(d >= 1)) throw DomainError("costs: d must be >= 1");
    const double threshold = tent_p - 0.5 * (tent_left + tent_right);
    const double V = std::exp(-log_gauss_sf(GaussParams(0.5 * (y + z), 2 * d), threshold));
    const double e = y - z + tent_left - tent_right;
    const double S = std::sqrt(d) * std::exp(e * e / (16 * d));
    return {V, S};
}

// P(X >= s + r | X >= s) for X ~ N(m, var).
inline double conditional_gaussian_tail(double m, double var, double r, double s) {
    const GaussParams g(m, var);
    return std::exp(log_gauss_sf(g, s + r) - log_gauss_sf(g, s));
}

// P(U in [0,1] | Y=y, Z=z) = P(X + m in [0,1] | X + m >= 0), X ~ N(0, 2d), m = (y+z)/2 + delta.
inline double conditional_jump_probability(double y, double z, double delta, double d) {
    const double m = 0.5 * (y + z) + delta;
    return 1 - conditional_gaussian_tail(m, 2 * d, 1.0, 0.0);
}

// Bridge variances at p -+ 4d between neighbouring poles.
inline double sigma2_left(double p, double p_minus, double d) { return 4 * d * (p - p_minus - 4 * d) / (p - p_minus); }
inline double sigma2_right(double p, double p_plus, double d) { return 4 * d * (p_plus - p - 4 * d) / (p_plus - p); }

// One draw: standard bridge on [x0, x_end] from 0 to 0 positive at every given point.
inline bool bridge_above_points(double x0, double x_end, const std::vector<double>& pts, RandomStream& rng) {
    std::vector<double> times{x0};
    times.insert(times.end(), pts.begin(), pts.end());
    times.push_back(x_end);
    const auto v = sample_bridge_at(times, 0.0, 0.0, rng);
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (!(v[i] > 0)) return false;
    return true;
}

}  // namespace bgl
