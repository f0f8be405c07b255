#pragma once

#include <bgl/brownian.hpp>
#include <bgl/ensemble.hpp>
#include <bgl/extremum.hpp>
#include <bgl/harness.hpp>
#include <bgl/jump.hpp>
#include <bgl/lpp.hpp>
#include <bgl/meander.hpp>
#include <bgl/oracles.hpp>
#include <bgl/quilt.hpp>
#include <bgl/stats.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace bgl {

// Acceptance tolerances.
namespace tol {
inline constexpr double meander_mass = 1e-6;
inline constexpr double chapman_kolmogorov = 1e-5;
inline constexpr double meander_ks = 0.01;
inline constexpr double from_zero = 0.5;
inline constexpr double increment = 0.75;
inline constexpr double return_from_above = 0.967;
inline constexpr double stderr_slack = 3.0;
inline constexpr double tail_r2 = 0.9;
inline constexpr std::size_t tail_min_hits = 30;
inline constexpr double argmax_ks = 0.015;
inline constexpr double ks_p = 0.01;
inline constexpr double continuity = 1e-12;
inline constexpr double quilt_continuity = 1e-9;
inline constexpr double slope_window = 0.15;
}  // namespace tol

namespace exp_detail {

inline std::string b2s(bool b) { return b ? "1" : "0"; }
inline std::string i2s(long long v) { return std::to_string(v); }
// short form for identifiers
inline std::string tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Log-survival fit of an integer count: bins with at least min_hits exceedances.
struct CountTailFit {
    LinearFit fit{0, 0, 0, 0};
    std::size_t bins = 0;
    std::vector<TailEstimate> tail;
};

inline CountTailFit count_tail_fit(const std::vector<int>& counts, std::size_t min_hits) {
    CountTailFit out;
    int mx = 0;
    for (int c : counts) mx = std::max(mx, c);
    std::vector<double> l, lp;
    for (int ell = 1; ell <= mx; ++ell) {
        std::size_t hits = 0;
        for (int c : counts) hits += c >= ell;
        out.tail.push_back(TailEstimate::make(ell, hits, counts.size()));
        if (hits >= min_hits) {
            l.push_back(ell);
            lp.push_back(std::log(double(hits) / double(counts.size())));
        }
    }
    out.bins = l.size();
    if (l.size() >= 2) out.fit = linear_fit(l, lp);
    return out;
}

inline double bound_slack(const TailEstimate& t) { return tol::stderr_slack * t.stderr_(); }

}  // namespace exp_detail

// ---------------------------------------------------------------- meander

inline ExperimentOutput run_meander_densities(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"kind", "s", "x", "t", "value", "error"};
    double worst_mass = 0;
    for (double s : {0.1, 0.4, 0.7})
        for (double x : {0.05, 0.5, 1.5})
            for (double f : {0.1, 0.5, 1.0}) {
                const double t = s + (1 - s) * f;
                const double m = meander_transition_mass(s, x, t);
                worst_mass = std::max(worst_mass, std::abs(m - 1));
                out.table.add({"transition-mass", fmt17(s), fmt17(x), fmt17(t), fmt17(m), fmt17(std::abs(m - 1))});
            }
    double worst_marg = 0;
    for (double t : {0.25, 0.5, 0.75, 1.0}) {
        const double m = meander_marginal_cdf(t, 40 * std::sqrt(t));
        worst_marg = std::max(worst_marg, std::abs(m - 1));
        out.table.add({"marginal-mass", "0", "0", fmt17(t), fmt17(m), fmt17(std::abs(m - 1))});
    }
    out.check("1.transition-mass", "transition densities integrate to one on the 3x3x3 lattice", worst_mass < tol::meander_mass,
              "max error " + fmt17(worst_mass));
    out.check("1.marginal-mass", "marginal densities integrate to one", worst_marg < tol::meander_mass,
              "max error " + fmt17(worst_marg));

    double worst_ck = 0;
    const double pts[3][5] = {{0.1, 0.5, 0.3, 0.6, 0.7}, {0.2, 1.0, 0.5, 0.9, 0.4}, {0.05, 0.2, 0.5, 1.0, 1.2}};
    for (const auto& q : pts) {
        const double r = chapman_kolmogorov_residual(q[0], q[1], q[2], q[3], q[4]);
        worst_ck = std::max(worst_ck, r);
        out.table.add({"chapman-kolmogorov", fmt17(q[0]), fmt17(q[1]), fmt17(q[3]), fmt17(q[4]), fmt17(r)});
    }
    out.check("2.chapman-kolmogorov", "Chapman-Kolmogorov residual at three points", worst_ck < tol::chapman_kolmogorov,
              "max residual " + fmt17(worst_ck));

    // chain sampler on a four-step grid, read at t = 1/4, 1/2, 1
    const Grid g(0, 1, 4);
    const auto paths = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto m = sample_meander(g, r);
        return std::array<double, 3>{m[1], m[2], m[4]};
    });
    const double ts[3] = {0.25, 0.5, 1.0};
    for (int k = 0; k < 3; ++k) {
        std::vector<double> v;
        for (const auto& p : paths) v.push_back(p[k]);
        const double t = ts[k];
        const auto ks = ks_one_sample(v, [t](double y) { return meander_marginal_cdf(t, y); });
        out.table.add({"sampler-ks", "0", "0", fmt17(t), fmt17(ks.statistic), fmt17(ks.p_value)});
        out.summary["sampler_ks"][std::to_string(k)] = {{"t", t}, {"statistic", ks.statistic}, {"p_value", ks.p_value}};
        out.check("3.sampler-ks-t" + tag(t), "meander sampler KS distance at fixed time", ks.statistic < tol::meander_ks,
                  "D = " + fmt17(ks.statistic) + " over " + std::to_string(v.size()) + " draws");
    }
    return out;
}

inline ExperimentOutput run_meander_bounds(const RunContext&) {
    ExperimentOutput out;
    out.table.columns = {"kind", "eta", "t", "x", "worst_value", "bound", "closed_form_constant"};
    struct Row {
        MeanderBound which;
        double bound;
        double constant;
    };
    for (const Row& r : {Row{MeanderBound::from_zero, tol::from_zero, from_zero_constant()},
                         Row{MeanderBound::increment, tol::increment, increment_constant()},
                         Row{MeanderBound::return_from_above, tol::return_from_above, return_constant()}}) {
        const auto w = meander_bound_lattice(r.which);
        out.table.add({to_string(r.which), fmt17(w.eta), fmt17(w.t), fmt17(w.x), fmt17(w.value), fmt17(r.bound), fmt17(r.constant)});
        out.check("4." + to_string(r.which), "lattice maximum below the stated bound", w.value <= r.bound,
                  "max " + fmt17(w.value) + " over " + std::to_string(w.points) + " points (bound " + fmt17(r.bound) + ")");
    }
    out.summary["return_from_above_delta"] = 1 - return_constant();
    return out;
}

inline ExperimentOutput run_nz_tails(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"kind", "eta", "a", "hits", "trials", "estimate", "ci_low", "ci_high", "bound"};
    const std::size_t steps = ctx.params.count("steps");
    const auto etas = ctx.params.reals("etas");
    const auto as = ctx.params.reals("as");
    const auto tail_etas = ctx.params.reals("tail_etas");
    const Grid g(0, 1, steps);
    struct Draw {
        std::vector<char> nz;
        std::vector<int> num;
    };
    const auto draws = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto m = sample_meander(g, r);
        Draw d;
        for (double eta : etas)
            for (double a : as) d.nz.push_back(nz_event(m, eta, a));
        for (double eta : tail_etas) d.num.push_back(num_nz(m, eta));
        return d;
    });
    std::size_t cell = 0;
    for (double eta : etas)
        for (double a : as) {
            std::size_t hits = 0;
            for (const auto& d : draws) hits += d.nz[cell];
            ++cell;
            const auto t = TailEstimate::make(0, hits, draws.size());
            const double bound = 2 * a;
            out.table.add({"nz", fmt17(eta), fmt17(a), i2s(hits), i2s(draws.size()), fmt17(t.estimate), fmt17(t.ci.lower),
                           fmt17(t.ci.upper), fmt17(bound)});
            out.check("5.nz-eta" + tag(eta) + "-a" + tag(a), "P(NZ) <= 2a + 3 stderr",
                      t.estimate <= bound + bound_slack(t), "estimate " + fmt17(t.estimate) + " vs bound " + fmt17(bound));
        }
    for (std::size_t k = 0; k < tail_etas.size(); ++k) {
        std::vector<int> c;
        for (const auto& d : draws) c.push_back(d.num[k]);
        const auto f = count_tail_fit(c, tol::tail_min_hits);
        for (const auto& t : f.tail)
            out.table.add({"num_nz_tail", fmt17(tail_etas[k]), fmt17(t.threshold), i2s(t.hits), i2s(t.trials), fmt17(t.estimate),
                           fmt17(t.ci.lower), fmt17(t.ci.upper), ""});
        out.check("num-nz-tail-eta" + tag(tail_etas[k]), "NumNZ log-survival decays log-linearly",
                  f.bins >= 2 && f.fit.slope < 0 && f.fit.r2 >= tol::tail_r2,
                  "slope " + fmt17(f.fit.slope) + ", R2 " + fmt17(f.fit.r2) + ", bins " + i2s(f.bins), false);
    }
    return out;
}

// ---------------------------------------------------------------- Brownian extremum

inline ExperimentOutput run_nt_arcsine(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"eta", "a", "hits", "trials", "estimate", "ci_low", "ci_high", "arcsin", "bound"};
    const std::size_t steps = ctx.params.count("steps");
    const auto etas = ctx.params.reals("etas");
    const auto as = ctx.params.reals("as");
    const double d = 0.5;
    const Window I{ctx.params.real("interval_lo"), ctx.params.real("interval_hi")};
    const double arc = arcsin_measure(I.lo, I.hi, d);
    const auto draws = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto b = sample_motion(Grid(-d, d, steps), 0.0, r);
        std::vector<char> hit;
        const bool loc = maxloc_event(b, I);
        for (double eta : etas)
            for (double a : as) hit.push_back(loc && nt_event(b, NearTouchSpec(eta, a, d, I)));
        return hit;
    });
    std::size_t cell = 0;
    for (double eta : etas)
        for (double a : as) {
            std::size_t hits = 0;
            for (const auto& h : draws) hits += h[cell];
            ++cell;
            const auto t = TailEstimate::make(0, hits, draws.size());
            const double bound = 4 * a * arc;
            out.table.add({fmt17(eta), fmt17(a), i2s(hits), i2s(draws.size()), fmt17(t.estimate), fmt17(t.ci.lower),
                           fmt17(t.ci.upper), fmt17(arc), fmt17(bound)});
            out.check("6.nt-eta" + tag(eta) + "-a" + tag(a), "P(NT and MaxLoc) <= 4a ArcSin + 3 stderr",
                      t.estimate <= bound + bound_slack(t), "estimate " + fmt17(t.estimate) + " vs bound " + fmt17(bound));
        }
    return out;
}

inline ExperimentOutput run_numnt_tail(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"eta", "ell", "hits", "trials", "estimate", "ci_low", "ci_high"};
    const std::size_t steps = ctx.params.count("steps");
    const auto etas = ctx.params.reals("etas");
    const auto draws = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto b = sample_motion(Grid(-0.5, 0.5, steps), 0.0, r);
        std::vector<int> c;
        for (double eta : etas) c.push_back(num_nt(b, eta));
        return c;
    });
    for (std::size_t k = 0; k < etas.size(); ++k) {
        std::vector<int> c;
        for (const auto& d : draws) c.push_back(d[k]);
        const auto f = count_tail_fit(c, tol::tail_min_hits);
        for (const auto& t : f.tail)
            out.table.add({fmt17(etas[k]), fmt17(t.threshold), i2s(t.hits), i2s(t.trials), fmt17(t.estimate), fmt17(t.ci.lower),
                           fmt17(t.ci.upper)});
        out.summary["fit"][tag(etas[k])] = {{"slope", f.fit.slope}, {"r2", f.fit.r2}, {"bins", f.bins}};
        out.check("7.numnt-eta" + tag(etas[k]), "log P(NumNT >= l) decreasing and log-linear",
                  f.bins >= 2 && f.fit.slope < 0 && f.fit.r2 >= tol::tail_r2,
                  "slope " + fmt17(f.fit.slope) + ", R2 " + fmt17(f.fit.r2) + ", bins " + i2s(f.bins));
    }
    return out;
}

inline ExperimentOutput run_bridge_sup(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"T", "r", "hits", "trials", "estimate", "exact", "stderr"};
    const std::size_t steps = ctx.params.count("steps");
    const auto Ts = ctx.params.reals("horizons");
    const auto rs = ctx.params.reals("levels");
    for (double T : Ts) {
        const auto sups = ctx.map(ctx.draws, [&](std::size_t i) {
            auto r = ctx.stream(i, "T" + tag(T));
            return bridge_supremum(sample_bridge(Grid(0, T, steps), 0, 0, r), r);
        });
        for (double lvl : rs) {
            std::size_t hits = 0;
            for (double s : sups) hits += s >= lvl;
            const double exact = std::exp(-2 * lvl * lvl / T);
            const double n = double(sups.size());
            const double est = hits / n;
            const double se = std::sqrt(exact * (1 - exact) / n);
            out.table.add({fmt17(T), fmt17(lvl), i2s(hits), i2s(sups.size()), fmt17(est), fmt17(exact), fmt17(se)});
            out.check("9.sup-T" + tag(T) + "-r" + tag(lvl), "bridge sup tail within 3 stderr of exp(-2r^2/T)",
                      std::abs(est - exact) <= tol::stderr_slack * se, "estimate " + fmt17(est) + " exact " + fmt17(exact));
        }
    }
    return out;
}

namespace exp_detail {
// Argmax after filling the cells next to the grid argmax with bridges of `refine` steps each.
inline double refined_argmax(const GridFunction& b, std::size_t refine, RandomStream& rng) {
    const Grid& g = b.grid();
    const std::size_t im = grid_max(b).index;
    const std::size_t lo = im > 0 ? im - 1 : 0, hi = std::min(g.steps(), im + 1);
    GridFunction fine(Grid(g.x(lo), g.x(hi), (hi - lo) * refine));
    for (std::size_t j = lo; j <= hi; ++j) fine[(j - lo) * refine] = b[j];
    for (std::size_t j = lo; j < hi; ++j) fill_bridge(fine, (j - lo) * refine, (j - lo + 1) * refine, rng);
    return fine.grid().x(grid_max(fine).index);
}
}  // namespace exp_detail

inline ExperimentOutput run_arcsine_argmax(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"quantity", "value", "threshold"};
    const std::size_t points = ctx.params.count("points");
    const std::size_t dpoints = ctx.params.count("decomposition_points");
    const std::size_t min_side = ctx.params.count("decomposition_min_side");
    const double d = ctx.params.real("d");
    struct Draw {
        double argmax, refined;
        double xm01;
        double left_mid, right_mid;
        bool interior;
    };
    const auto draws = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto b = sample_motion(Grid(-d, d, points - 1), 0.0, r);
        Draw dr{b.grid().x(grid_max(b).index), 0, 0, 0, 0, false};
        auto rr = ctx.stream(i, "refine");
        dr.refined = refined_argmax(b, 64, rr);
        auto r2 = ctx.stream(i, "decomposition");
        const auto w = sample_motion(Grid(0, 1, dpoints - 1), 0.0, r2);
        const auto dec = decompose_at_max(w, 64);
        // both sides need enough native steps for the canonical midpoint
        if (dec.left_meander && dec.right_meander && dec.argmax_index >= min_side && dpoints - 1 - dec.argmax_index >= min_side) {
            dr.interior = true;
            dr.xm01 = dec.argmax;
            dr.left_mid = (*dec.left_meander)[32];
            dr.right_mid = (*dec.right_meander)[32];
        }
        return dr;
    });
    std::vector<double> am, rf, xm, lm, rm;
    for (const auto& x : draws) {
        am.push_back(x.argmax);
        rf.push_back(x.refined);
        if (x.interior) {
            xm.push_back(x.xm01);
            lm.push_back(x.left_mid);
            rm.push_back(x.right_mid);
        }
    }
    auto cdf = [d](double x) { return arcsin_cdf(x, d); };
    const auto ks = ks_one_sample(am, cdf);
    const auto ksr = ks_one_sample(rf, cdf);
    // a walk of m steps stays below its start with probability about (pi m)^{-1/2}
    const double atom = double(std::count(am.begin(), am.end(), -d)) / double(am.size());
    out.table.add({"ks_statistic", fmt17(ks.statistic), fmt17(tol::argmax_ks)});
    out.table.add({"left_endpoint_mass", fmt17(atom), fmt17(1 / std::sqrt(std::numbers::pi * double(points - 1)))});
    out.table.add({"ks_statistic_refined", fmt17(ksr.statistic), fmt17(tol::argmax_ks)});
    out.summary["ks"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"left_endpoint_mass", atom}};
    out.summary["ks_refined"] = {{"statistic", ksr.statistic}, {"p_value", ksr.p_value}};
    out.check("8.arcsine-ks", "grid argmax KS distance to the arcsine law", ks.statistic < tol::argmax_ks,
              "D = " + fmt17(ks.statistic) + " at " + i2s(am.size()) + " draws; left endpoint mass " + fmt17(atom));
    out.check("arcsine-ks-refined", "argmax refined by bridge filling, KS distance to the arcsine law", ksr.statistic < tol::argmax_ks,
              "D = " + fmt17(ksr.statistic) + ", p = " + fmt17(ksr.p_value), false);
    if (xm.size() > 2) {
        const double lim = tol::stderr_slack / std::sqrt(double(xm.size()));
        const double c1 = correlation(lm, rm), c2 = correlation(lm, xm), c3 = correlation(rm, xm);
        out.table.add({"corr_left_right", fmt17(c1), fmt17(lim)});
        out.table.add({"corr_left_xmax", fmt17(c2), fmt17(lim)});
        out.table.add({"corr_right_xmax", fmt17(c3), fmt17(lim)});
        out.check("decomposition-independence", "meander midpoints uncorrelated with each other and with x_max",
                  std::abs(c1) < lim && std::abs(c2) < lim && std::abs(c3) < lim,
                  "correlations " + fmt17(c1) + ", " + fmt17(c2) + ", " + fmt17(c3) + " vs " + fmt17(lim) + " over " +
                      i2s(xm.size()) + " interior draws");
    }
    return out;
}

// ---------------------------------------------------------------- LPP and ensembles

inline ExperimentOutput run_lpp_gue(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"n", "points_per_unit", "draws", "ks_statistic", "p_value", "mean_lpp", "mean_gue", "gating"};
    const auto ns = ctx.params.reals("ns");
    const std::size_t ppu = ctx.params.count("points_per_unit");
    const std::size_t fine = ctx.params.count("fine_points_per_unit");
    const std::size_t fine_draws = ctx.params.count("fine_draws");
    auto run = [&](int n, std::size_t per_unit, std::size_t draws, const std::string& tag, bool gating) {
        const Grid g(0, 1, per_unit);
        const auto lpp = ctx.map(draws, [&](std::size_t i) {
            auto r = ctx.stream(i, tag + "lpp" + i2s(n));
            const auto env = Environment::sample(n, g, r, i);
            return last_passage(env, {0.0, 1}, {1.0, n});
        });
        const auto gue = ctx.map(draws, [&](std::size_t i) {
            auto r = ctx.stream(i, tag + "gue" + i2s(n));
            return gue_top(n, 1.0, r);
        });
        const auto ks = ks_two_sample(lpp, gue);
        out.summary["mean_gap"][tag + i2s(n)] = mean(gue) - mean(lpp);
        out.table.add({i2s(n), i2s(per_unit), i2s(draws), fmt17(ks.statistic), fmt17(ks.p_value), fmt17(mean(lpp)),
                       fmt17(mean(gue)), b2s(gating)});
        out.check(std::string(gating ? "10." : "") + "lpp-gue-n" + i2s(n) + (gating ? "" : "-fine"),
                  "two-sample KS between last passage value and top GUE eigenvalue", ks.p_value > tol::ks_p,
                  "p = " + fmt17(ks.p_value) + ", D = " + fmt17(ks.statistic) + ", mean gap " + fmt17(mean(gue) - mean(lpp)),
                  gating);
    };
    for (double nd : ns) run(int(nd), ppu, ctx.draws, "", true);
    if (fine > 0 && fine_draws > 0) {
        const int n = int(ns.back());
        run(n, fine, std::min(fine_draws, ctx.draws), "fine", false);
        // grid bias of last passage scales like h^{1/2}
        out.summary["gap_ratio_vs_sqrt_refinement"] = {
            {"observed", out.summary["mean_gap"][i2s(n)].get<double>() / out.summary["mean_gap"]["fine" + i2s(n)].get<double>()},
            {"sqrt_refinement", std::sqrt(double(fine) / double(ppu))}};
    }
    return out;
}

inline ExperimentOutput run_gibbs_invariance(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"draw", "pre", "post", "attempts"};
    const int n = int(ctx.params.integer("n"));
    const std::size_t steps = ctx.params.count("steps");
    const Grid g(ctx.params.real("t0"), ctx.params.real("t1"), steps);
    const std::size_t ia = steps / 4, ib = 3 * steps / 4, mid = steps / 2;
    struct Draw {
        double pre, post;
        std::size_t attempts;
        bool ok;
    };
    const auto draws = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto a = dyson_bm(n, g, r);
        const auto b = dyson_bm(n, g, r);
        Draw d{a(1, mid), 0, 0, false};
        try {
            const auto res = gibbs_resample(b, 1, ia, ib, r, 1000000);
            d.post = res.ensemble(1, mid);
            d.attempts = res.telemetry.attempts;
            d.ok = true;
        } catch (const BudgetExhausted& e) {
            d.attempts = e.attempts();
        }
        return d;
    });
    std::vector<double> pre, post;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        pre.push_back(draws[i].pre);
        if (draws[i].ok) post.push_back(draws[i].post);
        out.table.add({i2s(i), fmt17(draws[i].pre), draws[i].ok ? fmt17(draws[i].post) : "", i2s(draws[i].attempts)});
    }
    const auto ks = ks_two_sample(pre, post);
    out.summary["accepted"] = post.size();
    out.summary["ks"] = {{"statistic", ks.statistic}, {"p_value", ks.p_value}};
    out.check("11.gibbs-invariance", "one-point law unchanged by resampling", ks.p_value > tol::ks_p,
              "p = " + fmt17(ks.p_value) + " with " + i2s(post.size()) + " accepted resamples");
    out.check("11.gibbs-accepted", "enough accepted resamples", post.size() >= ctx.params.count("min_accepted"),
              i2s(post.size()) + " accepted");
    return out;
}

inline ExperimentOutput run_polymer_ordering(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"env", "y", "argmax", "weight"};
    const int n = int(ctx.params.integer("n"));
    const auto ys = ctx.params.reals("ys");
    const std::size_t per_unit = ctx.params.count("points_per_unit");
    const double w = kpz_width(n);
    // x in [-1, 1] scaled, y up to max(ys)
    const double left = -w, right = n + w * (*std::max_element(ys.begin(), ys.end()));
    const auto steps = static_cast<std::size_t>(std::ceil((right - left) * double(per_unit)));
    const Grid g(left, left + double(steps) / double(per_unit), steps);
    const auto rows = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto env = Environment::sample(n + kLineOffset, g, r, i);
        const Grid rg = reward_grid(env, n);
        GridFunction f(rg);
        for (std::size_t j = 0; j < rg.points(); ++j) f[j] = -std::abs(rg.x(j));
        const RewardFunction rf(f, {1.0, 1.0, 1.0});
        std::vector<RewardedResult> res;
        for (double y : ys) {
            // nearest admissible grid abscissa for the endpoint
            const double uy = g.x(g.nearest_index(n + w * y));
            res.push_back(f_rewarded(env, n, rf, (uy - n) / w));
        }
        return res;
    });
    std::size_t violations = 0;
    for (std::size_t e = 0; e < rows.size(); ++e)
        for (std::size_t k = 0; k < ys.size(); ++k) {
            out.table.add({i2s(e), fmt17(ys[k]), fmt17(rows[e][k].argmax), fmt17(rows[e][k].weight)});
            if (k > 0 && rows[e][k].argmax < rows[e][k - 1].argmax) ++violations;
        }
    out.check("16.polymer-ordering", "argmax non-decreasing in y", violations == 0,
              i2s(violations) + " violations over " + i2s(rows.size()) + " environments");
    return out;
}

// ---------------------------------------------------------------- jump ensemble

struct JumpSetup {
    JumpParams params;
    double h;
    std::vector<double> offsets;
};

inline JumpSetup jump_setup(const Params& p) {
    RegularityConstants reg{p.real("c"), p.real("C")};
    const CkSource src = p.str("ck_source") == "explicit" ? CkSource::explicit_ : CkSource::formula;
    if (p.str("ck_source") != "explicit" && p.str("ck_source") != "formula")
        throw ConfigError("ck_source must be 'formula' or 'explicit'");
    return {JumpParams::make(p.real("epsilon"), int(p.integer("k")), p.real("d"), reg, p.real("const"), src,
                             p.integer("n_curves")),
            p.real("h"), {}};
}

inline std::vector<ParamSpec> jump_param_specs() {
    return {{"epsilon", "0.001", "target probability"},
            {"k", "1", "curves resampled"},
            {"d", "1", "window half-width"},
            {"c", "0.009", "regularity constant c"},
            {"C", "1", "regularity constant C"},
            {"const", "1", "constant of the epsilon window"},
            {"ck_source", "formula", "formula | explicit"},
            {"n_curves", "0", "ensemble curve count for the lower epsilon bound (0 = unbounded)"},
            {"h", "0.25", "target grid step"},
            {"spacing", "8", "offset between surrogate curves"},
            {"max_fav_attempts", "100", "surrogate redraws per Fav draw"}};
}

inline std::vector<double> surrogate_offsets(const JumpSetup& s, double spacing) {
    std::vector<double> off;
    for (int i = 0; i <= s.params.k; ++i) off.push_back(-spacing * i);
    return off;
}

struct FavDraw {
    std::optional<JumpData> data;
    std::size_t tries = 0;
    std::size_t fav_hits = 0;
};

inline FavDraw draw_fav(const JumpSetup& s, double spacing, std::size_t max_tries, RandomStream& r) {
    FavDraw out;
    const Grid g = jump_grid(s.params.T, s.h);
    const auto off = surrogate_offsets(s, spacing);
    while (out.tries < max_tries) {
        ++out.tries;
        const auto e = parabolic_ou_ensemble(g, off, r);
        JumpData jd = build_jump_data(e, s.params);
        if (jd.fav.fav() && jd.has_poles()) {
            ++out.fav_hits;
            out.data = std::move(jd);
            return out;
        }
    }
    return out;
}

inline ExperimentOutput run_jump_structure(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"draw", "fav", "pole_case", "p", "y", "z", "u", "w", "accepted_attempts", "pass"};
    const auto setup = jump_setup(ctx.params);
    const double spacing = ctx.params.real("spacing");
    const std::size_t max_tries = ctx.params.count("max_fav_attempts");
    const auto& P = setup.params;
    struct Draw {
        bool fav = false;
        std::vector<std::string> violations;
        Observables obs;
        std::size_t attempts = 0;
        bool pass = false;
        double mid_j = 0, mid_bridge = 0;
        std::size_t poles = 0;
        double max_slope = 0, residual = 0;
    };
    const auto draws = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        Draw d;
        auto fd = draw_fav(setup, spacing, max_tries, r);
        if (!fd.data) {
            d.violations.push_back("no Fav draw within budget");
            return d;
        }
        d.fav = true;
        const JumpData& jd = *fd.data;
        const double T = P.T;
        auto fail = [&](const std::string& m) { d.violations.push_back(m); };
        for (std::size_t j = 0; j < jd.tent.pieces(); ++j) {
            d.max_slope = std::max(d.max_slope, std::abs(jd.tent.slope(j)));
            if (std::abs(jd.tent.slope(j)) > 4 * T) fail("tent slope outside [-4T, 4T]");
        }
        if (!jd.tent.concave(1e-9 * T * T)) fail("tent not concave");
        for (std::size_t j = 1; j < jd.poles.size(); ++j) {
            if (jd.poles[j] - jd.poles[j - 1] < P.d_ip) fail("pole separation below d_ip");
            const double s2 = sigma2_left(jd.poles[j], jd.poles[j - 1], P.d);
            if (jd.poles[j] - jd.poles[j - 1] >= 5 * P.d && !(s2 >= 0.8 * P.d && s2 <= 4 * P.d)) fail("variance outside [4d/5, 4d]");
        }
        d.poles = jd.poles.size();
        if (double(jd.poles.size()) > 2 * T / P.d_ip) fail("|P| > 2T/d_ip");
        if (jd.fav.f2 && !(jd.l <= -T / 2 && jd.r >= T / 2)) fail("l > -T/2 or r < T/2 on F2");
        if (jd.poles.front() != jd.l || jd.poles.back() != jd.r) fail("l or r not a pole");
        JumpSampler sampler(jd);
        try {
            const auto c = sampler.sample(r, 1000000);
            d.attempts = c.attempts;
            if (!candidate_conditioning_holds(c.curves, jd)) fail("accepted candidate violates conditioning");
            d.residual = reconstruction_continuity_residual(c.curves, jd);
            if (!(d.residual < tol::continuity)) fail("reconstruction discontinuous");
            const auto re = reconstruct(c.curves, jd);
            for (std::size_t j = jd.il; j <= jd.ir; ++j)
                for (std::size_t k = 0; k < c.curves.size(); ++k)
                    if (re(k + 1, j) != c.curves[k][j - jd.il]) {
                        fail("reconstruction differs from the candidate on [l, r]");
                        j = jd.ir;
                        break;
                    }
            d.pass = re.ordered();
            if (d.pass) {
                std::vector<double> xl, xr;
                for (const auto& cu : c.curves) {
                    xl.push_back(cu[0]);
                    xr.push_back(cu[cu.size() - 1]);
                }
                if (!corner_criterion(xl, jd.corner_l) || !corner_criterion(xr, jd.corner_r)) fail("pass without corner criterion");
            }
            auto r2 = r.substream(7);
            d.obs = observables(c.curves[P.k - 1], jd, P.d, 0.5 * P.d, &r2);
            // domination probe: J(k, midpoint) against the bridge from (l, -T^2) to (r, -T^2)
            const std::size_t mid = (jd.ir - jd.il) / 2;
            d.mid_j = c.curves[P.k - 1][mid];
            const auto b = sample_bridge_at({jd.l, jd.grid.x(jd.il + mid), jd.r}, -T * T, -T * T, r2);
            d.mid_bridge = b[1];
        } catch (const BudgetExhausted& e) {
            d.attempts = e.attempts();
            fail("candidate budget exhausted");
        }
        return d;
    });
    std::size_t violations = 0, fav = 0;
    std::vector<double> jm, bm;
    std::map<std::string, std::size_t> kinds;
    std::size_t max_poles = 0;
    double max_slope = 0, max_res = 0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const auto& d = draws[i];
        fav += d.fav;
        violations += d.violations.size();
        for (const auto& v : d.violations) ++kinds[v];
        max_poles = std::max(max_poles, d.poles);
        max_slope = std::max(max_slope, d.max_slope);
        max_res = std::max(max_res, d.residual);
        if (d.fav) {
            jm.push_back(d.mid_j);
            bm.push_back(d.mid_bridge);
        }
        const auto& o = d.obs;
        out.table.add({i2s(i), b2s(d.fav), b2s(o.pole_case), o.pole_case ? fmt17(o.p) : "", fmt17(o.y), fmt17(o.z),
                       o.pole_case ? fmt17(o.u) : "", o.pole_case ? fmt17(o.w_eta) : "", i2s(d.attempts), b2s(d.pass)});
    }
    out.summary["T"] = P.T;
    out.summary["d_ip"] = P.d_ip;
    out.summary["max_poles"] = max_poles;
    out.summary["pole_count_bound"] = 2 * P.T / P.d_ip;
    out.summary["max_tent_slope"] = max_slope;
    out.summary["max_continuity_residual"] = max_res;
    out.summary["violations"] = kinds;
    std::string detail = i2s(violations) + " violations over " + i2s(fav) + " Fav draws";
    for (const auto& [k, v] : kinds) detail += "; " + k + ": " + i2s(v);
    out.check("12.jump-structure", "structural asserts over Fav draws", violations == 0 && fav == draws.size(), detail);
    // stochastic domination at 5 quantile probes
    if (jm.size() > 10) {
        std::vector<double> all = jm;
        all.insert(all.end(), bm.begin(), bm.end());
        std::sort(all.begin(), all.end());
        bool ok = true;
        std::string probes;
        for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const double x = all[std::size_t(q * (all.size() - 1))];
            auto ecdf = [x](const std::vector<double>& v) {
                return double(std::count_if(v.begin(), v.end(), [x](double a) { return a <= x; })) / double(v.size());
            };
            const double fj = ecdf(jm), fb = ecdf(bm);
            const double se = std::sqrt(fj * (1 - fj) / jm.size() + fb * (1 - fb) / bm.size());
            ok = ok && fj <= fb + tol::stderr_slack * se;
            probes += " " + fmt17(fj) + "<=" + fmt17(fb);
        }
        out.check("jump-domination", "J(k, midpoint) dominates the low bridge", ok, "probes" + probes);
    }
    return out;
}

inline ExperimentOutput run_jump_pass_rate(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"draw", "fav", "surrogate_tries", "accepted_attempts", "pass"};
    const auto setup = jump_setup(ctx.params);
    const double spacing = ctx.params.real("spacing");
    const auto& P = setup.params;
    struct Draw {
        bool fav = false, pass = false;
        std::size_t attempts = 0;
    };
    const Grid g = jump_grid(P.T, setup.h);
    const auto off = surrogate_offsets(setup, spacing);
    const auto draws = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        Draw d;
        const auto e = parabolic_ou_ensemble(g, off, r);
        const auto jd = build_jump_data(e, P);
        d.fav = jd.fav.fav() && jd.has_poles();
        if (!d.fav) return d;
        JumpSampler s(jd);
        const auto c = s.sample(r, 1000000);
        d.attempts = c.attempts;
        d.pass = pass_test(c.curves, jd);
        return d;
    });
    std::size_t fav = 0, pass = 0;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        fav += draws[i].fav;
        pass += draws[i].pass;
        out.table.add({i2s(i), b2s(draws[i].fav), "1", i2s(draws[i].attempts), b2s(draws[i].pass)});
    }
    const auto fci = wilson_ci(fav, draws.size());
    const auto pci = wilson_ci(pass, std::max<std::size_t>(fav, 1));
    const double log_bound = P.log_pass_lower_bound();
    out.summary["fav"] = {{"hits", fav}, {"trials", draws.size()}, {"ci", {fci.lower, fci.upper}}, {"target", 1 - P.epsilon},
                          {"fav_exponent", P.fav_exponent()}};
    out.summary["pass"] = {{"hits", pass}, {"trials", fav}, {"ci", {pci.lower, pci.upper}}, {"log_lower_bound", log_bound}};
    out.check("19.fav-frequency", "Fav frequency >= 1 - epsilon", fci.upper >= 1 - P.epsilon,
              i2s(fav) + "/" + i2s(draws.size()) + " (upper " + fmt17(fci.upper) + ")", false);
    out.check("19.pass-rate", "Pass rate consistent with exp(-3973 k^{7/2} d_ip^2 D_k^2 (log 1/eps)^{2/3})",
              fav > 0 && std::log(pci.upper) >= log_bound,
              i2s(pass) + "/" + i2s(fav) + " passes; log upper " + fmt17(std::log(pci.upper)) + " vs log bound " + fmt17(log_bound),
              false);
    return out;
}

inline ExperimentOutput run_jump_density_monitor(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"kind", "y", "z", "value", "shape"};
    const auto setup = jump_setup(ctx.params);
    const double spacing = ctx.params.real("spacing");
    const std::size_t max_tries = ctx.params.count("max_fav_attempts");
    const auto& P = setup.params;
    const auto obs = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        auto fd = draw_fav(setup, spacing, max_tries, r);
        if (!fd.data) return std::optional<Observables>{};
        JumpSampler s(*fd.data);
        const auto c = s.sample(r, 1000000);
        auto r2 = r.substream(7);
        return std::optional<Observables>(observables(c.curves[P.k - 1], *fd.data, P.d, 0.5 * P.d, &r2));
    });
    std::vector<double> ys, zs;
    std::size_t g1 = 0, g2 = 0, pole = 0;
    for (const auto& o : obs) {
        if (!o) continue;
        out.table.add({"sample", fmt17(o->y), fmt17(o->z), o->pole_case ? "pole" : "no-pole", ""});
        ys.push_back(o->y);
        zs.push_back(o->z);
        pole += o->pole_case;
        g1 += o->pole_case && in_good_region_1(o->y, o->z, P.R, P.T);
        g2 += !o->pole_case && in_good_region_2(o->y, o->z, P.R, P.T);
    }
    // Gaussian KDE against d^{-1} exp(-y^2/8d - z^2/8d)
    double max_ratio = 0;
    if (ys.size() > 2) {
        const double bw = 1.06 * std::sqrt(0.5 * (variance(ys) + variance(zs))) * std::pow(double(ys.size()), -1.0 / 6);
        for (int a = -4; a <= 4; ++a)
            for (int b = -4; b <= 4; ++b) {
                const double y = a * std::sqrt(P.d), z = b * std::sqrt(P.d);
                double k = 0;
                for (std::size_t i = 0; i < ys.size(); ++i) k += phi(bw * bw, y - ys[i]) * phi(bw * bw, z - zs[i]);
                k /= double(ys.size());
                const double shape = std::exp(-y * y / (8 * P.d) - z * z / (8 * P.d)) / P.d;
                max_ratio = std::max(max_ratio, k / shape);
                out.table.add({"kde", fmt17(y), fmt17(z), fmt17(k), fmt17(shape)});
            }
    }
    out.summary["samples"] = ys.size();
    out.summary["pole_case"] = pole;
    out.summary["in_G1"] = g1;
    out.summary["in_G2"] = g2;
    out.summary["max_kde_to_shape_ratio"] = max_ratio;
    out.check("19.density-overlay", "KDE of (Y,Z) finite against the bound shape", std::isfinite(max_ratio) && !ys.empty(),
              "max ratio " + fmt17(max_ratio), false);
    return out;
}

inline ExperimentOutput run_costs_tables(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"kind", "a", "b", "c", "value"};
    const double d = ctx.params.real("d");
    for (int iy = -4; iy <= 4; ++iy)
        for (int iz = -4; iz <= 4; ++iz) {
            const auto c = vault_slope_costs(iy, iz, d, 0, 0, 0);
            out.table.add({"V", fmt17(iy), fmt17(iz), fmt17(d), fmt17(c.V)});
            out.table.add({"S", fmt17(iy), fmt17(iz), fmt17(d), fmt17(c.S)});
        }
    // conditional-Gaussian monotonicity over 9 (m, sigma^2, r) combinations
    std::size_t bad = 0;
    for (double m : {-1.0, 0.0, 1.0})
        for (double v : {0.5, 2.0})
            for (double r : {0.5, 1.0}) {
                if (v == 0.5 && r == 0.5 && m != 0.0) continue;  // 9 combinations
                double prev = 2;
                for (int i = 0; i < 50; ++i) {
                    const double s = -3 + 6.0 * i / 49;
                    const double q = conditional_gaussian_tail(m, v, r, s);
                    bad += !(q < prev);
                    prev = q;
                }
                out.table.add({"monotonicity", fmt17(m), fmt17(v), fmt17(r), fmt17(prev)});
            }
    out.check("15.monotonicity", "P(X >= s + r | X >= s) strictly decreasing in s", bad == 0, i2s(bad) + " non-decreasing steps");
    const double p0 = conditional_jump_probability(0, 0, 0, 1), p50 = conditional_jump_probability(50, 50, 0, 1);
    out.summary["conditional_jump_probability"] = {{"m0", p0}, {"m50", p50}};
    // bridge above points: calibration at N = 1 gives G = e^{-3}
    const std::size_t n = ctx.draws;
    bool above_ok = true;
    std::string detail;
    for (int N : {2, 3, 4}) {
        const auto hits = ctx.map(n, [&](std::size_t i) {
            auto r = ctx.stream(i, "above" + i2s(N));
            std::vector<double> pts;
            for (int j = 1; j < N; ++j) pts.push_back(10.0 * j / N);
            return bridge_above_points(0.0, 20.0, pts, r) ? 1 : 0;
        });
        std::size_t h = 0;
        for (int x : hits) h += x;
        const auto t = TailEstimate::make(N, h, n);
        const double bound = std::exp(3.0) / std::sqrt(double(N)) * std::exp(-3.0 * N);
        above_ok = above_ok && t.estimate + bound_slack(t) >= bound;
        detail += " N=" + i2s(N) + ":" + fmt17(t.estimate) + ">=" + fmt17(bound);
        out.table.add({"bridge-above", i2s(N), fmt17(t.estimate), fmt17(bound), fmt17(t.stderr_())});
    }
    out.check("bridge-above-poles", "P(bridge above N-1 points) >= G^-1 N^-1/2 e^{-3N}", above_ok, detail);
    return out;
}

inline ExperimentOutput run_corner_oracle(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"instance", "k", "probes", "mismatches", "passes"};
    const std::size_t probes = ctx.params.count("probes");
    const auto res = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const std::size_t k = 1 + i % 3;
        const SideData s = oracle::random_side(k, 30, r);
        const auto corner = corner_vector(s);
        std::array<std::size_t, 3> acc{k, 0, 0};
        for (std::size_t p = 0; p < probes; ++p) {
            std::vector<double> x(k);
            for (std::size_t c = 0; c < k; ++c) x[c] = 2.0 * double(k - c) + 2 * r.normal();
            const bool a = corner_criterion(x, corner), b = side_test_direct(s, x);
            acc[1] += a != b;
            acc[2] += b;
        }
        return acc;
    });
    std::size_t mism = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        mism += res[i][1];
        out.table.add({i2s(i), i2s(res[i][0]), i2s(probes), i2s(res[i][1]), i2s(res[i][2])});
    }
    out.check("13.corner-oracle", "corner criterion equals the direct side-interval test", mism == 0,
              i2s(mism) + " mismatches over " + i2s(res.size()) + " instances");
    return out;
}

inline ExperimentOutput run_pole_oracle(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"instance", "points", "dip", "poles", "match"};
    const auto res = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const std::size_t n = 2 + std::size_t(r.uniform() * 11);
        std::vector<double> x{0};
        for (std::size_t j = 1; j < n; ++j) x.push_back(x.back() + 0.2 + 3 * r.uniform());
        const double dip = 1 + r.uniform() * 3;
        const auto ora = dip > x.back() - x.front() ? std::vector<std::size_t>{} : oracle::pole_set(x, dip);
        std::vector<std::size_t> got;
        bool threw = false;
        try {
            got = pole_set_indices(x, dip);
        } catch (const ParameterError&) {
            threw = true;
        }
        const bool match = threw ? ora.empty() : got == ora;
        return std::tuple<std::size_t, double, std::size_t, bool>{n, dip, got.size(), match};
    });
    std::size_t bad = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        const auto& [n, dip, np, m] = res[i];
        bad += !m;
        out.table.add({i2s(i), i2s(n), fmt17(dip), i2s(np), b2s(m)});
    }
    out.check("14.pole-oracle", "pole set equals the exhaustive optimum", bad == 0, i2s(bad) + " mismatches over " + i2s(res.size()));
    return out;
}

// ---------------------------------------------------------------- quilt

inline ExperimentOutput run_quilt_continuity(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"instance", "stitches", "residual", "identity_ok", "shift_invariance_ok"};
    const auto res = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const Grid g(0, 1, 256);
        std::vector<GridFunction> fab;
        for (int j = 0; j < 4; ++j) fab.push_back(sample_motion(g, 10 * r.normal(), r));
        const std::vector<double> st{g.x(40), g.x(128), g.x(200)};
        const auto q = build_quilt(fab, st);
        bool ident = true;
        std::size_t piece = 0;
        for (std::size_t j = 0; j < g.points(); ++j) {
            while (piece < 3 && j > g.index_of(st[piece])) ++piece;
            if (std::abs(q.values[j] - (fab[piece][j] + q.shifts[piece])) > 0) ident = false;
        }
        const auto triv = build_quilt({fab[0]}, {});
        for (std::size_t j = 0; j < g.points(); ++j)
            if (triv.values[j] != fab[0][j]) ident = false;
        auto shifted = fab;
        for (std::size_t j = 0; j < g.points(); ++j) shifted[0][j] += 3.25;
        const auto qs = build_quilt(shifted, st);
        bool inv = true;
        for (std::size_t j = 0; j < g.points(); ++j)
            if (std::abs(qs.values[j] - (q.values[j] + 3.25)) > 1e-9) inv = false;
        return std::tuple<double, bool, bool>{q.continuity_residual(), ident, inv};
    });
    double worst = 0;
    bool ident = true, inv = true;
    for (std::size_t i = 0; i < res.size(); ++i) {
        const auto& [rr, id, iv] = res[i];
        worst = std::max(worst, rr);
        ident = ident && id;
        inv = inv && iv;
        out.table.add({i2s(i), "3", fmt17(rr), b2s(id), b2s(iv)});
    }
    out.check("17.quilt-continuity", "continuity residual at stitches", worst < tol::quilt_continuity, "max residual " + fmt17(worst));
    out.check("17.quilt-identity", "piecewise identity and trivial-stitch identity (bitwise)", ident, ident ? "exact" : "mismatch");
    out.check("quilt-shift-invariance", "vertical shift of the first fabric shifts the quilt", inv, inv ? "ok" : "mismatch");
    return out;
}

inline ExperimentOutput run_increment_moment(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"y", "moment", "stderr", "samples", "fitted_slope", "target"};
    const int n = int(ctx.params.integer("n"));
    const double eta = ctx.params.real("eta");
    const auto ys = ctx.params.reals("ys");
    double ymax = 0;
    for (double y : ys) ymax = std::max(ymax, y);
    const Grid g = increment_grid(n, ymax, int(ctx.params.integer("refine")));
    const auto diffs = ctx.map(ctx.draws, [&](std::size_t i) {
        auto r = ctx.stream(i);
        const auto env = Environment::sample(n + kLineOffset, g, r, i);
        const auto f = narrow_wedge(env, n);
        const double w0 = f_rewarded_weight(env, n, f, 0.0);
        std::vector<double> v;
        for (double y : ys) v.push_back(std::pow(std::abs(f_rewarded_weight(env, n, f, y) - w0), 2 - eta));
        return v;
    });
    std::vector<double> lx, ly;
    std::vector<MomentRow> rows;
    for (std::size_t k = 0; k < ys.size(); ++k) {
        std::vector<double> col;
        for (const auto& d : diffs) col.push_back(d[k]);
        const double m = mean(col);
        rows.push_back({ys[k], m, std::sqrt(variance(col) / double(col.size())), col.size()});
        if (ys[k] > 0 && m > 0) {
            lx.push_back(std::log(ys[k]));
            ly.push_back(std::log(m));
        }
    }
    LinearFit fit{0, 0, 0, 0};
    if (lx.size() >= 2) fit = linear_fit(lx, ly);
    const double target = 1 - eta / 2;
    for (const auto& r : rows)
        out.table.add({fmt17(r.y), fmt17(r.moment), fmt17(r.stderr_), i2s(r.samples), fmt17(fit.slope), fmt17(target)});
    out.summary["slope"] = fit.slope;
    out.summary["slope_se"] = fit.slope_se;
    out.summary["target"] = target;
    out.check("19.increment-moment-slope", "log-log slope within 0.15 of 1 - eta/2", std::abs(fit.slope - target) <= tol::slope_window,
              "slope " + fmt17(fit.slope) + " +- " + fmt17(fit.slope_se) + " vs " + fmt17(target), false);
    return out;
}

// ---------------------------------------------------------------- analytic lemmas

inline ExperimentOutput run_analytic_lemmas(const RunContext& ctx) {
    using namespace exp_detail;
    ExperimentOutput out;
    out.table.columns = {"lemma", "ok", "worst_margin", "detail"};
    for (const auto& c : {check_normal_bounds(), check_integral_bound(), check_density_tool(), check_conditioned_inf()}) {
        out.table.add({c.name, b2s(c.ok), fmt17(c.worst_margin), c.detail});
        out.check("15." + c.name, "inequality verified on its lattice", c.ok, "worst margin " + fmt17(c.worst_margin));
    }
    auto r = ctx.stream(0, "geometric");
    const auto g = geometric_sum_tail(int(ctx.params.integer("geo_n")), ctx.params.real("geo_p"), ctx.params.real("geo_lambda"),
                                      ctx.draws, r);
    const auto t = TailEstimate::make(g.lambda * g.mu, std::size_t(std::llround(g.empirical * double(g.draws))), g.draws);
    const std::string detail = "P(G >= lambda mu): exact " + fmt17(g.exact) + ", empirical " + fmt17(g.empirical) +
                               ", support-from-one exact " + fmt17(g.exact_shifted) + " vs stated bound " + fmt17(g.stated_bound) +
                               " (rate-function form " + fmt17(g.janson_bound) + ")";
    out.table.add({"geometric-sum", b2s(g.exact <= g.stated_bound), fmt17(g.stated_bound - g.exact), detail});
    out.check("15.geometric-sum", "P(G >= lambda mu) <= exp(-p mu lambda)", t.estimate <= g.stated_bound + bound_slack(t), detail);
    out.check("geometric-sum-rate-form", "P(G >= lambda mu) <= exp(-p mu (lambda - 1 - ln lambda)) under both supports",
              std::max(g.exact, g.exact_shifted) <= g.janson_bound,
              detail, false);
    return out;
}

// ---------------------------------------------------------------- registry

inline Registry make_registry() {
    Registry reg;
    auto add = [&](std::string name, std::string desc, bool monitoring, std::vector<std::string> cols, std::vector<ParamSpec> ps,
                   std::size_t fast, std::size_t full, std::function<ExperimentOutput(const RunContext&)> fn) {
        reg.add({std::move(name), std::move(desc), monitoring, std::move(cols), std::move(ps), fast, full, std::move(fn)});
    };
    add("meander-densities", "meander density normalisation, Chapman-Kolmogorov and sampler fidelity", false,
        {"kind", "s", "x", "t", "value", "error"}, {}, 100000, 100000, run_meander_densities);
    add("meander-bounds", "meander bounds by quadrature", false,
        {"kind", "eta", "t", "x", "worst_value", "bound", "closed_form_constant"}, {}, 1, 1, run_meander_bounds);
    add("nz-tails", "near-zero events of the meander and the NumNZ tail", false,
        {"kind", "eta", "a", "hits", "trials", "estimate", "ci_low", "ci_high", "bound"},
        {{"steps", "1000", "meander grid steps"},
         {"etas", "0.01,0.05,0.1", "eta lattice"},
         {"as", "0.05,0.1,0.2", "a lattice"},
         {"tail_etas", "0.01,0.05", "eta values for the NumNZ tail"}},
        1000, 100000, run_nz_tails);
    add("nt-arcsine", "near touch with max location for Brownian motion", false,
        {"eta", "a", "hits", "trials", "estimate", "ci_low", "ci_high", "arcsin", "bound"},
        {{"steps", "2048", "grid steps on [-1/2, 1/2]"},
         {"etas", "0.01,0.05", "eta lattice"},
         {"as", "0.05,0.1,0.2", "a lattice"},
         {"interval_lo", "0", "MaxLoc interval"},
         {"interval_hi", "0.5", "MaxLoc interval"}},
        1000, 100000, run_nt_arcsine);
    add("numnt-tail", "tail of the number of near touches", false, {"eta", "ell", "hits", "trials", "estimate", "ci_low", "ci_high"},
        {{"steps", "2048", "grid steps on [-1/2, 1/2]"}, {"etas", "0.01,0.05", "eta values"}}, 1000, 100000, run_numnt_tail);
    add("bridge-sup", "law of the Brownian bridge supremum", false, {"T", "r", "hits", "trials", "estimate", "exact", "stderr"},
        {{"steps", "64", "grid steps"}, {"horizons", "1,2", "bridge lengths"}, {"levels", "0.5,1,1.5", "levels r"}}, 2000, 100000,
        run_bridge_sup);
    add("arcsine-argmax", "arcsine law of the argmax and the decomposition at the maximum", false, {"quantity", "value", "threshold"},
        {{"points", "1024", "grid points"},
         {"d", "0.5", "half-width"},
         {"decomposition_points", "8192", "grid points of the decomposition probe"},
         {"decomposition_min_side", "1024", "native steps required on each side of the maximum"}}, 100000, 100000, run_arcsine_argmax);
    add("lpp-gue", "last passage value against the top GUE eigenvalue", false,
        {"n", "points_per_unit", "draws", "ks_statistic", "p_value", "mean_lpp", "mean_gue", "gating"},
        {{"ns", "2,5,10", "line counts"},
         {"points_per_unit", "2000", "environment grid resolution"},
         {"fine_points_per_unit", "16000", "resolution of the informational fine-grid run (0 = skip)"},
         {"fine_draws", "2000", "draws of the fine-grid run"}},
        300, 10000, run_lpp_gue);
    add("gibbs-invariance", "one-point law before and after Gibbs resampling of Dyson ensembles", false,
        {"draw", "pre", "post", "attempts"},
        {{"n", "5", "curves"}, {"steps", "64", "grid steps"}, {"t0", "1", "grid start"}, {"t1", "2", "grid end"},
         {"min_accepted", "0", "required accepted resamples"}},
        300, 5000, run_gibbs_invariance);
    add("jump-structure", "structural asserts of the jump ensemble on Fav draws", false,
        {"draw", "fav", "pole_case", "p", "y", "z", "u", "w", "accepted_attempts", "pass"}, jump_param_specs(), 5, 1000,
        run_jump_structure);
    add("jump-pass-rate", "Fav frequency and Pass rate monitoring", true, {"draw", "fav", "surrogate_tries", "accepted_attempts", "pass"},
        jump_param_specs(), 5, 1000, run_jump_pass_rate);
    add("jump-density-monitor", "(Y,Z) density overlays", true, {"kind", "y", "z", "value", "shape"}, jump_param_specs(), 5, 300,
        run_jump_density_monitor);
    add("costs-tables", "vault and slope costs, monotonicity, bridge above points", false, {"kind", "a", "b", "c", "value"},
        {{"d", "1", "window half-width"}}, 2000, 100000, run_costs_tables);
    add("corner-oracle", "corner criterion against brute-force side reconstruction", false,
        {"instance", "k", "probes", "mismatches", "passes"}, {{"probes", "200", "inner-value probes per instance"}}, 100, 100,
        run_corner_oracle);
    add("pole-oracle", "pole set against exhaustive search", false, {"instance", "points", "dip", "poles", "match"}, {}, 200, 200,
        run_pole_oracle);
    add("polymer-ordering", "monotonicity of the polymer argmax in y", false, {"env", "y", "argmax", "weight"},
        {{"n", "10", "lines"}, {"ys", "-0.2,-0.1,0,0.1,0.2", "endpoint lattice"}, {"points_per_unit", "500", "grid resolution"}}, 20,
        100, run_polymer_ordering);
    add("quilt-continuity", "quilt continuity and identity", false,
        {"instance", "stitches", "residual", "identity_ok", "shift_invariance_ok"}, {}, 50, 200, run_quilt_continuity);
    add("increment-moment", "increment moment exponent of the rewarded weight", true,
        {"y", "moment", "stderr", "samples", "fitted_slope", "target"},
        {{"n", "10", "lines"}, {"eta", "0.5", "moment exponent 2 - eta"}, {"ys", "0.01,0.02,0.05,0.1", "y lattice"},
         {"refine", "20", "grid points per 0.01 in y"}},
        100, 1000, run_increment_moment);
    add("analytic-lemmas", "normal, integral, density-tool, conditioned-inf and geometric-sum inequalities", false,
        {"lemma", "ok", "worst_margin", "detail"},
        {{"geo_n", "10", "geometric count"}, {"geo_p", "0.25", "geometric parameter"}, {"geo_lambda", "1.2", "lambda"}}, 10000,
        1000000, run_analytic_lemmas);
    return reg;
}

}  // namespace bgl
