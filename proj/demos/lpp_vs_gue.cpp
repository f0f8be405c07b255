// Brownian LPP across n lines at unit time against the top GUE eigenvalue.
#include <bgl/ensemble.hpp>
#include <bgl/lpp.hpp>
#include <bgl/stats.hpp>

#include <cstdio>
#include <cstdlib>

int main(int argc, char** argv) {
    using namespace bgl;
    const int n = argc > 1 ? std::atoi(argv[1]) : 4;
    const int draws = argc > 2 ? std::atoi(argv[2]) : 500;
    std::vector<double> lpp, gue;
    for (int i = 0; i < draws; ++i) {
        RandomStream r(2024, static_cast<std::uint64_t>(i));
        const auto env = Environment::sample(n, Grid(0, 1, 2000), r);
        lpp.push_back(last_passage(env, {0, 1}, {1, n}));
        RandomStream q(2025, static_cast<std::uint64_t>(i));
        gue.push_back(gue_top(n, 1.0, q));
    }
    const auto ks = ks_two_sample(lpp, gue);
    std::printf("n=%d draws=%d  mean lpp %.4f  mean gue %.4f  KS D=%.4f p=%.3g\n", n, draws, mean(lpp), mean(gue), ks.statistic,
                ks.p_value);
}
