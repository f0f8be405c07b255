#include <bgl/ensemble.hpp>
#include <bgl/gaussian.hpp>
#include <bgl/lpp.hpp>
#include <bgl/quilt.hpp>
#include <bgl/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bgl;

namespace {

Environment random_env(int lines, const Grid& g, std::uint64_t key) {
    return Environment::sample(lines, g, RandomStream(key, 0), key);
}

// Exhaustive search over nondecreasing jump indices t_1 <= ... <= t_{j-i}.
double lpp_oracle(const Environment& env, std::size_t ix, int i, std::size_t iy, int j) {
    double best = -INFINITY;
    std::vector<std::size_t> t(j - i, ix);
    for (;;) {
        double v = 0;
        std::size_t prev = ix;
        for (int k = i; k <= j; ++k) {
            const std::size_t next = k == j ? iy : t[k - i];
            v += env(k, next) - env(k, prev);
            prev = next;
        }
        best = std::max(best, v);
        int p = int(t.size()) - 1;
        while (p >= 0 && t[p] == iy) --p;
        if (p < 0) break;
        ++t[p];
        for (std::size_t q = p + 1; q < t.size(); ++q) t[q] = t[p];
    }
    return best;
}

RewardFunction wedge_at(const Environment& env, int n, std::size_t i0, double c = 0.0) {
    const Grid rg = reward_grid(env, n);
    GridFunction f(rg, std::vector<double>(rg.points(), -INFINITY), true);
    f[i0] = c;
    return RewardFunction(f, {1.0, 1.0, 1.0});
}

}  // namespace

TEST(Lpp, SingleLineIsIncrement) {
    const Grid g(0, 2, 40);
    const auto env = random_env(3, g, 1);
    EXPECT_EQ(last_passage(env, {0.5, 2}, {1.5, 2}), env(2, 30) - env(2, 10));
}

TEST(Lpp, ZeroEnvironment) {
    const Environment env(4, Grid(0, 1, 10));
    EXPECT_EQ(last_passage(env, {0.0, 1}, {1.0, 4}), 0.0);
}

TEST(Lpp, TwoLinesFourPointsByEnumeration) {
    Environment env(2, Grid(0, 3, 3));
    const double b1[] = {0, 1.0, -0.5, 0.7}, b2[] = {0, -2.0, 0.4, 0.1};
    for (std::size_t i = 0; i < 4; ++i) {
        env(1, i) = b1[i];
        env(2, i) = b2[i];
    }
    double best = -INFINITY;
    for (std::size_t t = 0; t < 4; ++t) best = std::max(best, b1[t] - b1[0] + b2[3] - b2[t]);
    EXPECT_DOUBLE_EQ(last_passage(env, {0.0, 1}, {3.0, 2}), best);
}

TEST(Lpp, MatchesExhaustiveSearch) {
    for (std::uint64_t key = 0; key < 30; ++key) {
        const auto env = random_env(4, Grid(0, 1, 7), 100 + key);
        EXPECT_NEAR(last_passage(env, {0.0, 1}, {1.0, 4}), lpp_oracle(env, 0, 1, 7, 4), 1e-12);
        EXPECT_NEAR(last_passage(env, {2.0 / 7, 2}, {6.0 / 7, 3}), lpp_oracle(env, 2, 2, 6, 3), 1e-12);
    }
}

TEST(Lpp, MonotoneInIncrements) {
    RandomStream r(5, 0);
    for (int rep = 0; rep < 50; ++rep) {
        auto env = random_env(3, Grid(0, 1, 12), 200 + rep);
        const double before = last_passage(env, {0.0, 1}, {1.0, 3});
        // raise one increment of one row: shift the row from index j on
        const int row = 1 + int(r.uniform() * 3);
        const std::size_t j = 1 + std::size_t(r.uniform() * 12);
        for (std::size_t i = j; i <= 12; ++i) env(row, i) += 0.3;
        EXPECT_GE(last_passage(env, {0.0, 1}, {1.0, 3}), before - 1e-12);
    }
}

TEST(Lpp, Superadditive) {
    const auto env = random_env(4, Grid(0, 1, 10), 7);
    const double whole = last_passage(env, {0.0, 1}, {1.0, 4});
    for (std::size_t z = 0; z <= 10; ++z)
        for (int m = 1; m <= 4; ++m)
            EXPECT_GE(whole + 1e-12, last_passage(env, {0.0, 1}, {z / 10.0, m}) + last_passage(env, {z / 10.0, m}, {1.0, 4}));
}

TEST(Lpp, RefinementNeverDecreases) {
    for (int rep = 0; rep < 100; ++rep) {
        const auto env = random_env(3, Grid(0, 1, 16), 300 + rep);
        RandomStream r(301, rep);
        const auto fine = env.refined(r);
        EXPECT_GE(last_passage(fine, {0.0, 1}, {1.0, 3}), last_passage(env, {0.0, 1}, {1.0, 3}));
    }
}

TEST(Lpp, ScaledWeightFormula) {
    const auto env = random_env(2, Grid(0, 2, 40), 9);
    const double M = last_passage(env, {0.0, 1}, {1.0, 2});
    EXPECT_NEAR(scaled_weight(env, 1, 0, 0), (M - 2) / std::numbers::sqrt2, 1e-12);
}

TEST(Reward, NarrowWedgeEqualsScaledWeight) {
    const int n = 3;
    const double w = kpz_width(n);
    const Grid g(0, n + w * 0.5, 200);
    const auto env = random_env(n + kLineOffset, g, 11);
    const auto f = wedge_at(env, n, 0);
    for (double y : {0.0, 0.1, 0.25}) {
        const double uy = g.x(g.nearest_index(n + w * y));
        const double ys = (uy - n) / w;
        EXPECT_EQ(f_rewarded_weight(env, n, f, ys), scaled_weight(env, n, 0, ys));
        EXPECT_EQ(polymer_argmax(env, n, f, ys), 0.0);
    }
}

TEST(Reward, ShiftedPointReward) {
    const int n = 2;
    const Grid g(0, 2.0 * n, 100);
    const auto env = random_env(n + kLineOffset, g, 12);
    const std::size_t i0 = 10;
    const double x0 = reward_grid(env, n).x(i0);
    const auto f = wedge_at(env, n, i0, 0.4);
    EXPECT_NEAR(f_rewarded_weight(env, n, f, 0.0), scaled_weight(env, n, x0, 0.0) + 0.4, 1e-12);
}

TEST(Reward, ThreePointSupportByEnumeration) {
    const int n = 2;
    const Grid g(0, 2.0 * n, 100);
    const auto env = random_env(n + kLineOffset, g, 13);
    const Grid rg = reward_grid(env, n);
    GridFunction f(rg, std::vector<double>(rg.points(), -INFINITY), true);
    const std::size_t pts[] = {3, 20, 41};
    const double vals[] = {0.2, -0.3, 0.1};
    double best = -INFINITY;
    for (int i = 0; i < 3; ++i) {
        f[pts[i]] = vals[i];
        best = std::max(best, scaled_weight(env, n, rg.x(pts[i]), 0.0) + vals[i]);
    }
    EXPECT_NEAR(f_rewarded_weight(env, n, RewardFunction(f, {1, 1, 1}), 0.0), best, 1e-12);
}

TEST(Reward, DominatingPointWins) {
    const int n = 2;
    const Grid g(0, 2.0 * n, 100);
    const auto env = random_env(n + kLineOffset, g, 14);
    const Grid rg = reward_grid(env, n);
    GridFunction f(rg, std::vector<double>(rg.points(), -INFINITY), true);
    const double s5 = scaled_weight(env, n, rg.x(5), 0.0), s30 = scaled_weight(env, n, rg.x(30), 0.0);
    f[5] = -3.0;
    f[30] = -3.0 + std::abs(s5 - s30) + 0.5;
    EXPECT_EQ(polymer_argmax(env, n, RewardFunction(f, {10, 10, 10}), 0.0), rg.x(30));
    f[5] = f[30] + std::abs(s5 - s30) + 0.5;
    EXPECT_EQ(polymer_argmax(env, n, RewardFunction(f, {10, 10, 10}), 0.0), rg.x(5));
}

TEST(Reward, ClassViolationsRejected) {
    const Grid g(0, 2, 10);
    GridFunction f(g);
    for (std::size_t i = 0; i <= 10; ++i) f[i] = 1 + std::abs(g.x(i)) + 1;
    EXPECT_THROW(RewardFunction(f, {1, 1, 1}), DomainError);
    GridFunction low(g, -5.0);
    EXPECT_THROW(RewardFunction(low, {1, 1, 1}), DomainError);
    EXPECT_THROW(RewardFunction(GridFunction(g), {0, 1, 1}), DomainError);
}

TEST(Parabola, ValuesAndTangentIdentity) {
    EXPECT_NEAR(parabola_q(1), 0.7071067812, 1e-10);
    RandomStream r(15, 0);
    for (int i = 0; i < 100; ++i) {
        const double x = 6 * r.normal(), y = 6 * r.normal();
        EXPECT_NEAR(parabola_q(x), -tangent_l(x, y) + parabola_q(x - y), 1e-12 * (1 + x * x + y * y));
    }
}

TEST(Ensemble, RejectsUnordered) {
    const Grid g(0, 1, 4);
    EXPECT_THROW(LineEnsemble({GridFunction(g, 0.0), GridFunction(g, 0.0)}), OrderingError);
    EXPECT_NO_THROW(LineEnsemble({GridFunction(g, 1.0), GridFunction(g, 0.0)}));
}

TEST(Ensemble, ParabolicShiftZeroIsIdentity) {
    RandomStream r(16, 0);
    const auto e = dyson_bm(3, Grid(0.5, 1.5, 16), r);
    const auto s = parabolic_shift(e, 0.0);
    for (std::size_t i = 1; i <= 3; ++i) EXPECT_EQ(s.curve(i).values(), e.curve(i).values());
}

TEST(Dyson, SingleLineIsBrownian) {
    std::vector<double> end;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        RandomStream r(17, i);
        end.push_back(dyson_bm(1, Grid(0, 2, 8), r)(1, 8));
    }
    const auto ks = ks_one_sample(end, [](double x) { return normal_cdf(x / std::sqrt(2.0)); });
    EXPECT_LT(ks.statistic, 0.015);
}

TEST(Dyson, OrderedAndMatchesGueAtTimeOne) {
    std::vector<double> a, b;
    for (std::uint64_t i = 0; i < 4000; ++i) {
        RandomStream r(18, i), s(19, i);
        const auto e = dyson_bm(5, Grid(0, 1, 16), r);
        EXPECT_TRUE(e.ordered() || e.pinned_left());
        a.push_back(e(1, 16));
        b.push_back(gue_top(5, 1.0, s));
    }
    EXPECT_GT(ks_two_sample(a, b).p_value, 1e-3);
}

TEST(Dyson, ScaledCentering) {
    RandomStream r(20, 0);
    const int n = 4;
    auto e = dyson_bm(n, Grid(n, n + 2, 4), r);
    const auto s = scaled_ensemble(e, n);
    // L(i, y) = (lambda_i - n - t) / (sqrt2 n^{1/3}) at t = n + 2n^{2/3} y
    for (std::size_t j = 0; j <= 4; ++j)
        EXPECT_NEAR(s(1, j), (e(1, j) - n - e.grid().x(j)) / (std::numbers::sqrt2 * std::cbrt(double(n))), 1e-12);
    EXPECT_TRUE(s.ordered());
}

TEST(Regularity, VacuousEnvelopeAndDomain) {
    std::vector<LineEnsemble> draws;
    for (std::uint64_t i = 0; i < 200; ++i) {
        RandomStream r(21, i);
        draws.push_back(scaled_ensemble(dyson_bm(10, Grid(8, 12, 40), r), 10));
    }
    EXPECT_TRUE(regular_tail_check(draws, 10, 0.1, 1e6, {0.0}).all_ok());
    EXPECT_THROW(regular_tail_check(draws, 10, 0.1, 1e6, {0.0}, {0.5}), DomainError);
}

TEST(Gibbs, NoLowerCurveAcceptsImmediately) {
    RandomStream r(22, 0);
    const auto e = dyson_bm(1, Grid(1, 2, 32), r);
    const auto g = gibbs_resample(e, 1, 8, 24, r, 10);
    EXPECT_EQ(g.telemetry.attempts, 1u);
}

TEST(Gibbs, BoundaryPreservedAndOrdered) {
    RandomStream r(23, 0);
    const auto e = dyson_bm(4, Grid(1, 2, 32), r);
    const auto g = gibbs_resample(e, 2, 8, 24, r, 1000000).ensemble;
    EXPECT_TRUE(g.ordered());
    for (std::size_t i = 1; i <= 4; ++i)
        for (std::size_t j = 0; j <= 32; ++j)
            if (i > 2 || j <= 8 || j >= 24) {
                EXPECT_EQ(g(i, j), e(i, j));
            }
}

TEST(Gibbs, ReplayIsDeterministic) {
    RandomStream r(24, 0);
    const auto e = dyson_bm(3, Grid(1, 2, 32), r);
    RandomStream a(25, 1), b(25, 1);
    const auto ga = gibbs_resample(e, 1, 4, 28, a, 1000000), gb = gibbs_resample(e, 1, 4, 28, b, 1000000);
    EXPECT_EQ(ga.telemetry.attempts, gb.telemetry.attempts);
    EXPECT_EQ(ga.ensemble.curve(1).values(), gb.ensemble.curve(1).values());
}

TEST(Gibbs, BudgetExhaustion) {
    const Grid g(0, 1, 16);
    GridFunction top(g, 1.0), low(g, 0.0);
    for (std::size_t j = 1; j < 16; ++j) {
        top[j] = 4.0;
        low[j] = 3.9;  // far above the top curve's pinned ends
    }
    const LineEnsemble e({top, low});
    RandomStream r(26, 0);
    EXPECT_THROW(gibbs_resample(e, 1, 0, 16, r, 5), BudgetExhausted);
}

TEST(Increment, NarrowWedgeZeroShiftHasZeroIncrement) {
    const int n = 4;
    const Grid g = increment_grid(n, 0.05);
    const auto env = random_env(n + kLineOffset, g, 27);
    const auto f = narrow_wedge(env, n);
    EXPECT_EQ(f_rewarded_weight(env, n, f, 0.0) - f_rewarded_weight(env, n, f, 0.0), 0.0);
    EXPECT_NO_THROW(f_rewarded_weight(env, n, f, 0.05));
}
