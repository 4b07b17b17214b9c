#pragma once

#include <cstdint>

namespace tfa {

// Counter-based deterministic generator. Every random quantity in the
// toolkit is derived from (master seed, stream index) so that parallel
// sweeps are reproducible independent of scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ^ 0x9e3779b97f4a7c15ULL) {}

    // Stream derivation: a child generator for (seed, index).
    static Rng derive(std::uint64_t master_seed, std::uint64_t index) {
        Rng r(mix(master_seed + 0x632be59bd9b4e019ULL * (index + 1)));
        r.next();
        return r;
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1).
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + std::int64_t(next() % std::uint64_t(hi - lo + 1));
    }

    bool coin() { return (next() & 1) != 0; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    std::uint64_t state_;
};

} // namespace tfa
