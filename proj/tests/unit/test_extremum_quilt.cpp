#include <bgl/extremum.hpp>
#include <bgl/quilt.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

using namespace bgl;

namespace {

// Largest eta-separated subset of the qualifying points, by full enumeration.
int separated_oracle(const Grid& g, const std::vector<std::size_t>& q, double eta) {
    int best = 0;
    std::vector<std::size_t> chosen;
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == q.size()) {
            best = std::max(best, int(chosen.size()));
            return;
        }
        rec(i + 1);
        if (chosen.empty() || g.x(q[i]) - g.x(chosen.back()) >= eta - 1e-9 * g.h()) {
            chosen.push_back(q[i]);
            rec(i + 1);
            chosen.pop_back();
        }
    };
    rec(0);
    return best;
}

}  // namespace

TEST(ArcSine, ClosedForms) {
    EXPECT_NEAR(arcsin_measure(-0.5, 0.5, 0.5), 1.0, 1e-15);
    EXPECT_NEAR(arcsin_measure(0, 0.5, 0.5), 0.5, 1e-15);
    EXPECT_NEAR(arcsin_measure(0, 0.25, 0.5), 1.0 / 6, 1e-15);
    EXPECT_NEAR(arcsin_cdf(0, 2), 0.5, 1e-15);
    EXPECT_THROW(arcsin_measure(0.3, 0.1, 0.5), DomainError);
}

TEST(NearTouch, ConcaveParabolaIsNotANearTouch) {
    const Grid g(-0.5, 0.5, 200);
    GridFunction f(g);
    for (std::size_t i = 0; i <= 200; ++i) f[i] = -50 * g.x(i) * g.x(i);
    // drop at distance eta is 50 eta^2 = 0.125 > a sqrt(eta) = 0.05
    EXPECT_FALSE(nt_event(f, NearTouchSpec(0.05, 0.1 / std::sqrt(0.05) * 0.5)));
}

TEST(NearTouch, ConstructedWitness) {
    const Grid g(-0.5, 0.5, 200);
    const double eta = 0.05, a = 0.2;
    GridFunction f(g, -1.0);
    f[g.index_of(-0.1)] = 1.0;
    f[g.index_of(-0.1 + eta)] = 1.0 - a * std::sqrt(eta) / 2;
    EXPECT_TRUE(nt_event(f, NearTouchSpec(eta, a)));
    f[g.index_of(-0.1 + eta)] = 1.0 - 2 * a * std::sqrt(eta);
    EXPECT_FALSE(nt_event(f, NearTouchSpec(eta, a)));
    EXPECT_TRUE(maxloc_event(f, {-0.2, 0}));
    EXPECT_FALSE(maxloc_event(f, {0, 0.5}));
}

TEST(NumNt, ConstantPathAndSinglePeak) {
    const Grid g(-0.5, 0.5, 100);
    EXPECT_EQ(num_nt(GridFunction(g, 3.0), 0.1), int(std::floor(1.0 / 0.1 + 1e-9)) + 1);
    GridFunction peak(g, -10.0);
    peak[37] = 0.0;
    EXPECT_EQ(num_nt(peak, 0.04), 1);
}

TEST(NumNt, GreedyEqualsExhaustive) {
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        RandomStream r(31, rep);
        const Grid g(-0.5, 0.5, 63);
        const auto b = sample_motion(g, 0.0, r);
        const double eta = 4 * g.h();
        const double level = grid_max(b).value - std::sqrt(eta);
        std::vector<std::size_t> q;
        for (std::size_t i = 0; i <= 63; ++i)
            if (b[i] >= level) q.push_back(i);
        if (q.size() > 26) continue;
        EXPECT_EQ(num_nt(b, eta), separated_oracle(g, q, eta));
    }
}

TEST(NumNt, MonotoneInEta) {
    for (std::uint64_t rep = 0; rep < 50; ++rep) {
        RandomStream r(32, rep);
        const Grid g(-0.5, 0.5, 256);
        const auto b = sample_motion(g, 0.0, r);
        // the sqrt(eta) level grows with eta, so compare at a fixed level via a shifted path
        int prev = std::numeric_limits<int>::max();
        for (int k : {1, 2, 4, 8, 16}) {
            const double eta = k * g.h();
            const double level = grid_max(b).value - std::sqrt(16 * g.h());
            std::vector<char> ok(257);
            for (std::size_t i = 0; i <= 256; ++i) ok[i] = b[i] >= level;
            const int c = detail::greedy_separated(g, ok, eta);
            EXPECT_LE(c, prev);
            prev = c;
        }
    }
}

TEST(NearZero, PathAboveOneHasNoNearZero) {
    const Grid g(0, 1, 100);
    GridFunction m(g, 1.0);
    m[0] = 0.0;
    EXPECT_FALSE(nz_event(m, 0.1, 0.5));
    m[50] = 0.1;
    EXPECT_TRUE(nz_event(m, 0.1, 0.5));
    EXPECT_EQ(num_nz(GridFunction(g, 0.0), 0.25), 5);
}

TEST(MeanderBounds, Examples) {
    EXPECT_LE(meander_bound_quadrature(MeanderBound::from_zero, 0.25), 0.5);
    EXPECT_LE(meander_bound_quadrature(MeanderBound::increment, 0.1, 0.5, 1.1 * std::sqrt(0.1)), 0.75);
    EXPECT_NEAR(return_constant(), 0.9653059514, 1e-9);
    EXPECT_GE(1 - return_constant(), 0.0338);
    EXPECT_LE(meander_bound_lattice(MeanderBound::return_from_above).value, return_constant());
    EXPECT_THROW(meander_bound_quadrature(MeanderBound::from_zero, 0.6), DomainError);
    EXPECT_THROW(meander_bound_quadrature(MeanderBound::increment, 0.1, 0.05, 0.1), DomainError);
    EXPECT_THROW(meander_bound_quadrature(MeanderBound::return_from_above, 0.05, 0.5, 0.1), DomainError);
}

TEST(AnalyticBounds, NormalBoundAtTwoSigma) {
    const double p = normal_sf(2.0);
    EXPECT_NEAR(p, 0.02275, 1e-5);
    EXPECT_LE(0.25 / std::sqrt(2 * std::numbers::pi) * std::exp(-2.0), p);
    EXPECT_LE(p, std::exp(-2.0));
    EXPECT_TRUE(check_normal_bounds().ok);
    EXPECT_TRUE(check_integral_bound().ok);
    EXPECT_TRUE(check_density_tool().ok);
}

TEST(AnalyticBounds, GeometricExactMatchesSimulation) {
    RandomStream r(33, 0);
    const auto g = geometric_sum_tail(10, 0.25, 1.2, 200000, r);
    const double se = std::sqrt(g.exact * (1 - g.exact) / 200000);
    EXPECT_NEAR(g.empirical, g.exact, 4 * se);
    EXPECT_GT(g.exact_shifted, g.exact);
    EXPECT_NEAR(g.stated_bound, std::exp(-12.0), 1e-18);
}

TEST(Meander, ChapmanKolmogorov) {
    EXPECT_LT(chapman_kolmogorov_residual(0.1, 0.5, 0.3, 0.6, 0.7), 1e-8);
    EXPECT_NEAR(meander_transition_mass(0.4, 0.5, 0.7), 1.0, 1e-8);
}

TEST(Quilt, NoStitchesIsIdentity) {
    RandomStream r(34, 0);
    const auto f = sample_motion(Grid(0, 1, 64), 1.0, r);
    const auto q = build_quilt({f}, {});
    EXPECT_EQ(q.values.values(), f.values());
}

TEST(Quilt, IdenticalFabricsNeedNoShift) {
    RandomStream r(35, 0);
    const auto f = sample_motion(Grid(0, 1, 64), 1.0, r);
    const auto q = build_quilt({f, f}, {0.5});
    EXPECT_EQ(q.shifts[1], 0.0);
    EXPECT_EQ(q.values.values(), f.values());
}

TEST(Quilt, RandomFabricsContinuousAndPiecewise) {
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        RandomStream r(36, rep);
        const Grid g(0, 1, 128);
        std::vector<GridFunction> fab;
        for (int i = 0; i < 4; ++i) fab.push_back(sample_motion(g, 5 * r.normal(), r));
        const std::vector<double> st{g.x(20), g.x(64), g.x(100)};
        const auto q = build_quilt(fab, st);
        EXPECT_LT(q.continuity_residual(), 1e-9);
        for (std::size_t j = 0; j <= 128; ++j) {
            const std::size_t piece = j <= 20 ? 0 : j <= 64 ? 1 : j <= 100 ? 2 : 3;
            EXPECT_EQ(q.piece[j], piece);
            EXPECT_EQ(q.values[j], fab[piece][j] + q.shifts[piece]);
        }
    }
}

TEST(Quilt, InvalidInputs) {
    const Grid g(0, 1, 16);
    const GridFunction f(g);
    EXPECT_THROW(build_quilt({f, f}, {}), DomainError);
    EXPECT_THROW(build_quilt({f, f}, {0.51}), GridAlignmentError);
    EXPECT_THROW(build_quilt({f, f, f}, {0.5, 0.25}), DomainError);
    EXPECT_THROW(build_quilt({f, GridFunction(Grid(0, 2, 16))}, {0.5}), GridAlignmentError);
}
