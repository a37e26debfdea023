#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace warcast {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// Deterministic xoshiro256** stream keyed by (seed, label). Streams with
// distinct labels are independent, and fork() derives sub-streams from the
// construction key rather than the draw position, so a stream's consumers
// cannot perturb each other. Every random draw in the toolkit flows through
// one of these.
class RandomStream {
public:
    RandomStream() : RandomStream(0, "") {}

    RandomStream(std::uint64_t seed, std::string_view label) {
        std::uint64_t s = seed;
        key_ = detail::splitmix64(s) ^ detail::fnv1a(label);
        s = key_;
        bool all_zero = true;
        for (auto& w : state_) {
            w = detail::splitmix64(s);
            all_zero = all_zero && w == 0;
        }
        if (all_zero) state_[0] = 1;
    }

    // Sub-stream derived from this stream's key; independent of draw count.
    RandomStream fork(std::string_view label) const { return RandomStream(key_, label); }

    std::uint64_t next_u64() {
        const std::uint64_t result = detail::rotl64(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl64(state_[3], 45);
        return result;
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased draw from [0, bound), bound >= 1.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t reject = (0 - bound) % bound;  // 2^64 mod bound
        std::uint64_t x = next_u64();
        while (x < reject) x = next_u64();
        return x % bound;
    }

    // Inclusive integer range.
    long long uniform_int(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    // Standard normal via the polar method.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t key_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline RandomStream seeded_stream(std::uint64_t seed, std::string_view label) {
    return RandomStream(seed, label);
}

}  // namespace warcast
