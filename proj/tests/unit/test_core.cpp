#include <bgl/brownian.hpp>
#include <bgl/gaussian.hpp>
#include <bgl/grid.hpp>
#include <bgl/meander.hpp>
#include <bgl/random.hpp>
#include <bgl/stats.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace bgl;

TEST(Philox, KnownAnswerZero) {
    const auto out = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out[0], 0x6627e8d5u);
    EXPECT_EQ(out[1], 0xe169c58du);
    EXPECT_EQ(out[2], 0xbc57ac4cu);
    EXPECT_EQ(out[3], 0x9b00dbd8u);
}

TEST(Philox, KnownAnswerOnes) {
    const auto out = Philox4x32::block({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u});
    EXPECT_EQ(out[0], 0x408f276du);
    EXPECT_EQ(out[1], 0x41c83b0eu);
    EXPECT_EQ(out[2], 0xa20bc7c6u);
    EXPECT_EQ(out[3], 0x6d5451fdu);
}

TEST(Philox, KnownAnswerPi) {
    const auto out = Philox4x32::block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
    EXPECT_EQ(out[0], 0xd16cfe09u);
    EXPECT_EQ(out[1], 0x94fdccebu);
    EXPECT_EQ(out[2], 0x5001e420u);
    EXPECT_EQ(out[3], 0x24126ea1u);
}

TEST(Streams, SameTripleSameOutput) {
    auto a = derive_stream(42, "x", 3), b = derive_stream(42, "x", 3);
    for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Streams, ReplicationsUncorrelated) {
    auto a = derive_stream(7, "exp", 0), b = derive_stream(7, "exp", 1);
    std::vector<double> u(1000000), v(1000000);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = a.uniform();
        v[i] = b.uniform();
    }
    EXPECT_LT(std::abs(correlation(u, v)), 3e-3);
}

TEST(Streams, SubstreamIndependentOfParentConsumption) {
    RandomStream a(11, 2), b(11, 2);
    for (int i = 0; i < 17; ++i) b();
    auto sa = a.substream(5), sb = b.substream(5);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(sa(), sb());
}

TEST(Streams, NormalMoments) {
    RandomStream r(1, 0);
    std::vector<double> x(200000);
    for (double& v : x) v = r.normal();
    EXPECT_NEAR(mean(x), 0.0, 0.01);
    EXPECT_NEAR(variance(x), 1.0, 0.01);
}

TEST(Grid, IndexOfAndAlignment) {
    Grid g(-1, 1, 8);
    EXPECT_EQ(g.index_of(0.25), 5u);
    EXPECT_EQ(g.x(8), 1.0);
    EXPECT_THROW(g.index_of(0.3), GridAlignmentError);
    EXPECT_THROW(Grid(1, 1, 4), DomainError);
    EXPECT_EQ(g.nearest_index(0.3), 5u);
}

TEST(Grid, CsvHas17Digits) {
    GridFunction f(Grid(0, 1, 2), std::vector<double>{0.1, 1.0 / 3, 2});
    std::ostringstream os;
    f.write_csv(os);
    EXPECT_NE(os.str().find("0.33333333333333331"), std::string::npos);
    EXPECT_EQ(os.str().substr(0, 8), "x,value\n");
}

TEST(GridFunction, RejectsNonFinite) {
    EXPECT_THROW(GridFunction(Grid(0, 1, 1), std::vector<double>{0, NAN}), DomainError);
    EXPECT_NO_THROW(GridFunction(Grid(0, 1, 1), std::vector<double>{0, -INFINITY}, true));
}

TEST(Gaussian, FrozenValues) {
    EXPECT_NEAR(phi(1, 1), 0.2419707245, 1e-10);
    EXPECT_NEAR(phi_tilde(1, 1), 0.3413447461, 1e-10);
    EXPECT_NEAR(normal_sf(2), 0.0227501319, 1e-10);
    EXPECT_THROW(phi(0, 1), DomainError);
    EXPECT_THROW(phi(-1, 1), DomainError);
}

TEST(Gaussian, LogTailContinuousAcrossSwitch) {
    EXPECT_NEAR(log_normal_sf(29.999999), log_normal_sf(30.0), 1e-4);
    EXPECT_NEAR(log_normal_sf(10), std::log(normal_sf(10)), 1e-10);
}

TEST(Brownian, BridgeEndpointsExact) {
    RandomStream r(3, 0);
    auto b = sample_bridge(Grid(0, 2, 100), 1.5, -0.5, r);
    EXPECT_EQ(b[0], 1.5);
    EXPECT_EQ(b[100], -0.5);
}

TEST(Brownian, BridgeMidpointVariance) {
    RandomStream r(4, 0);
    std::vector<double> mid;
    for (int i = 0; i < 20000; ++i) mid.push_back(sample_bridge(Grid(0, 1, 16), 0, 0, r)[8]);
    EXPECT_NEAR(variance(mid), 0.25, 0.01);
}

TEST(Brownian, DecomposeReassembles) {
    RandomStream r(5, 0);
    auto f = sample_motion(Grid(0, 1, 64), 0, r);
    auto pieces = bridge_decompose(f, {0.25, 0.5});
    ASSERT_EQ(pieces.size(), 3u);
    for (const auto& p : pieces) {
        EXPECT_EQ(p[0], 0.0);
        EXPECT_EQ(p[p.size() - 1], 0.0);
    }
    // piece + chord recovers the path
    const auto& p = pieces[1];
    for (std::size_t j = 0; j < p.size(); ++j) {
        const double w = static_cast<double>(j) / 16;
        EXPECT_NEAR(p[j] + (1 - w) * f[16] + w * f[32], f[16 + j], 1e-12);
    }
    EXPECT_THROW(bridge_decompose(f, {0.3}), GridAlignmentError);
}

TEST(Meander, DensityNormalised) {
    for (double t : {0.25, 0.5, 1.0}) EXPECT_NEAR(meander_marginal_cdf(t, 50), 1.0, 1e-8);
}

TEST(Meander, TransitionOutsideSupportIsZero) {
    EXPECT_EQ(meander_transition_density({0.2, 0.5}, {0.4, 0.0}), 0.0);
    EXPECT_THROW(MeanderState(0.4, -0.1), DomainError);
    EXPECT_THROW(meander_transition_density({0.4, 0.5}, {0.2, 0.1}), DomainError);
}

TEST(Meander, SamplerMatchesMarginal) {
    RandomStream r(9, 0);
    std::vector<double> x;
    for (int i = 0; i < 20000; ++i) x.push_back(meander_step(0, 0, 0.5, r));
    auto ks = ks_one_sample(x, [](double y) { return meander_marginal_cdf(0.5, y); });
    EXPECT_LT(ks.statistic, 0.015);
}

TEST(Meander, MaxDecompositionRoundTrip) {
    RandomStream r(10, 0);
    auto f = sample_motion(Grid(0, 1, 128), 0, r);
    auto d = decompose_at_max(f);
    auto g = reassemble_from_max(d, f.grid());
    for (std::size_t i = 0; i < f.size(); ++i) EXPECT_NEAR(g[i], f[i], 1e-12);
    if (d.right_meander) {
        for (double v : d.right_meander->values()) EXPECT_GE(v, 0.0);
    }
}

TEST(Meander, MaxAtEndpointIsDegenerate) {
    GridFunction f(Grid(0, 1, 4), std::vector<double>{0, 1, 2, 3, 4});
    auto d = decompose_at_max(f);
    EXPECT_TRUE(d.right_degenerate());
    EXPECT_FALSE(d.left_degenerate());
}

TEST(Stats, WilsonFrozen) {
    auto ci = wilson_ci(50, 100);
    EXPECT_NEAR(ci.lower, 0.4038, 1e-4);
    EXPECT_NEAR(ci.upper, 0.5962, 1e-4);
    EXPECT_EQ(wilson_ci(0, 30).lower, 0.0);
    EXPECT_EQ(wilson_ci(30, 30).upper, 1.0);
}

TEST(Stats, KsAgainstOwnEcdf) {
    std::vector<double> a{0.1, 0.4, 0.7, 0.9};
    auto ks = ks_one_sample(a, [&](double x) {
        return (std::upper_bound(a.begin(), a.end(), x) - a.begin() - 0.5) / 4.0;
    });
    EXPECT_LE(ks.statistic, 1.0 / 8 + 1e-15);
}

TEST(Stats, KsDisjointSupport) {
    EXPECT_EQ(ks_two_sample({1, 2, 3}, {4, 5}).statistic, 1.0);
}

TEST(Stats, KsNormalSample) {
    RandomStream r(12, 0);
    std::vector<double> x(100000);
    for (double& v : x) v = r.normal();
    EXPECT_GT(ks_one_sample(x, normal_cdf).p_value, 0.001);
}

TEST(Stats, KolmogorovBranchesAgree) {
    // series and theta forms should meet near the switch
    EXPECT_NEAR(kolmogorov_sf(1.1799999), kolmogorov_sf(1.18), 1e-6);
    EXPECT_NEAR(kolmogorov_sf(1.0), 0.2699996, 1e-6);
}

TEST(Stats, TailEstimatesMonotone) {
    auto t = tail_estimates({1, 2, 3, 4, 5}, {0, 2.5, 6});
    EXPECT_EQ(t[0].hits, 5u);
    EXPECT_EQ(t[1].hits, 3u);
    EXPECT_EQ(t[2].hits, 0u);
    for (const auto& e : t) {
        EXPECT_LE(e.ci.lower, e.estimate);
        EXPECT_GE(e.ci.upper, e.estimate);
    }
}
