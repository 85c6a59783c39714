#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace safegp {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derive a child seed from a master seed and one or more stream ids.
// Used so that every (replicate, fold) job gets an independent stream
// that can be reconstructed from the logged master seed.
inline uint64_t mix_seed(uint64_t seed, uint64_t a) {
    return splitmix64(seed ^ splitmix64(a + 0x51ed2701ab0e3c65ull));
}
inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}
inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b, uint64_t c) {
    return mix_seed(mix_seed(seed, a, b), c);
}

// Random source for the whole project. The standard <random> distributions
// are implementation-defined, so the few draws we need are implemented here
// on top of mt19937_64; identical seeds give identical streams on any
// platform, which the result logs rely on.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform index in [0, n). Rejection sampling keeps it unbiased.
    size_t index(size_t n) {
        assert(n > 0);
        const uint64_t limit = (UINT64_MAX / n) * n;
        uint64_t x = gen_();
        while (x >= limit) x = gen_();
        return static_cast<size_t>(x % n);
    }

    // Uniform double in [0, 1).
    double real() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * real(); }

    bool bernoulli(double p) { return real() < p; }

    // Box-Muller; two draws per call, no cached spare, so the stream
    // position after a call never depends on earlier history.
    double normal(double mean, double sd) {
        const double u1 = 1.0 - real();  // (0, 1]
        const double u2 = real();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * M_PI * u2);
    }

    // Fisher-Yates over [0, n); only the first `take` positions are needed
    // by some callers, but a full shuffle keeps the contract simple.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace safegp
