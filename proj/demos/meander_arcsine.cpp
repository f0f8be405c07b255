// Argmax location of a Brownian bridge on [0,1] should be uniform; of a motion, arcsine.
#include <bgl/brownian.hpp>
#include <bgl/extremum.hpp>
#include <bgl/stats.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace {

double argmax_location(const bgl::GridFunction& f) {
    const auto& v = f.values();
    return f.grid().x(static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin()));
}

}  // namespace

int main() {
    using namespace bgl;
    const Grid g(0, 1, 1024);
    std::vector<double> motion, bridge;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        RandomStream r(7, i);
        motion.push_back(argmax_location(sample_motion(g, 0, r)));
        bridge.push_back(argmax_location(sample_bridge(g, 0, 0, r)));
    }
    const auto km = ks_one_sample(motion, [](double t) { return 2 / std::numbers::pi * std::asin(std::sqrt(t)); });
    const auto kb = ks_one_sample(bridge, [](double t) { return t; });
    std::printf("motion argmax vs arcsine: D=%.4f\nbridge argmax vs uniform: D=%.4f\n", km.statistic, kb.statistic);
}
