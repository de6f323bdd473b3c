#pragma once

// Self-contained deterministic PRNG: xoshiro256** seeded via splitmix64.
// Every random draw in the simulation goes through this generator so that
// a run is reproducible from its integer seed alone, independent of the
// standard library's distribution implementations.

#include <array>
#include <cstdint>
#include <cmath>
#include <vector>

namespace scf {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0,1) with 53-bit resolution.
    double u01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Inclusive integer range.
    int uniform_int(int lo, int hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<int>(next_u64() % span);
    }

    double uniform(double lo, double hi) { return lo + u01() * (hi - lo); }

    bool bernoulli(double p) { return u01() < p; }

    // Low-variance integer draw with mean x: floor(x) plus a Bernoulli on the
    // fractional part. Used wherever a count must track a calibration target
    // tightly (latent/schema-visible/benign episode counts).
    int dither(double x) {
        if (x <= 0.0) return 0;
        const double fl = std::floor(x);
        return static_cast<int>(fl) + (bernoulli(x - fl) ? 1 : 0);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(next_u64() % v.size())];
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

}  // namespace scf
