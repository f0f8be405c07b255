#pragma once

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace bgl {

// Philox4x32-10 counter-based generator (Salmon et al.); yields 64-bit words.
class Philox4x32 {
public:
    using result_type = std::uint64_t;
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32() = default;
    Philox4x32(Key key, Counter ctr) : key_(key), ctr_(ctr) {}

    static Counter block(Counter ctr, Key key) {
        for (int r = 0; r < 10; ++r) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (pos_ == 2) refill();
        const std::uint64_t v = (std::uint64_t{buf_[2 * pos_]} << 32) | buf_[2 * pos_ + 1];
        ++pos_;
        return v;
    }

    const Key& key() const { return key_; }
    const Counter& counter() const { return ctr_; }

private:
    void refill() {
        buf_ = block(ctr_, key_);
        if (++ctr_[0] == 0) ++ctr_[1];
        pos_ = 0;
    }

    Key key_{0, 0};
    Counter ctr_{0, 0, 0, 0};
    Counter buf_{0, 0, 0, 0};
    int pos_ = 2;
};

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

// Value-semantic random stream. Copying a stream duplicates its future output.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream() : RandomStream(0, 0) {}
    RandomStream(std::uint64_t key, std::uint64_t lane) : key64_(key), lane_(lane) {
        eng_ = Philox4x32({static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
                          {0, 0, static_cast<std::uint32_t>(lane), static_cast<std::uint32_t>(lane >> 32)});
    }

    static constexpr result_type min() { return Philox4x32::min(); }
    static constexpr result_type max() { return Philox4x32::max(); }
    result_type operator()() { return eng_(); }

    // Uniform on [0,1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    // Uniform on (0,1).
    double uniform_open() { return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53; }
    double normal() { return normal_(eng_); }
    double normal(double mean, double sd) { return mean + sd * normal_(eng_); }
    double exponential() { return exp_(eng_); }

    // Independent child stream keyed by (this key, tag); unaffected by how much of
    // the parent has been consumed.
    RandomStream substream(std::uint64_t tag) const {
        return RandomStream(splitmix64(key64_ ^ splitmix64(tag + 0x632BE59BD9B4E019ull)), lane_);
    }

    std::uint64_t key() const { return key64_; }
    std::uint64_t lane() const { return lane_; }

private:
    std::uint64_t key64_;
    std::uint64_t lane_;
    Philox4x32 eng_;
    boost::random::normal_distribution<double> normal_{0.0, 1.0};
    boost::random::exponential_distribution<double> exp_{1.0};
};

// Keyed derivation: (master seed, experiment id) fixes the Philox key, the
// replication index occupies the upper counter lanes.
inline RandomStream derive_stream(std::uint64_t master_seed, std::string_view experiment,
                                  std::uint64_t replication) {
    const std::uint64_t key = splitmix64(master_seed ^ splitmix64(fnv1a64(experiment)));
    return RandomStream(key, replication);
}

}  // namespace bgl
