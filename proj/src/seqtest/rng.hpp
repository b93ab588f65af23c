#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace seqtest {

// Counter-based substream RNG: xoshiro256++ seeded through SplitMix64 from a
// (seed, stream) pair. Replication r of a simulation uses stream r, so the
// sequence consumed by one replication never depends on scheduling or worker
// count, and every draw is reproducible from (seed, stream, draw index).
class Rng {
  public:
    Rng(uint64_t seed, uint64_t stream) {
        // SplitMix64 over the combined key fills the xoshiro state; the
        // golden-gamma increment decorrelates nearby (seed, stream) pairs.
        uint64_t x = seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x61c88646680895ULL);
        for (auto& s : state_) s = splitmix64(x);
        // A few warm-up spins so near-zero states diffuse.
        for (int i = 0; i < 8; ++i) next_u64();
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0,1): 53-bit mantissa, zero remapped to the smallest step so
    // log() stays finite.
    double uniform01() {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    double exponential() { return -std::log(uniform01()); }

    // Box-Muller pair, one value returned per call, the spare cached. The
    // cache is per-Rng so determinism per stream is unaffected.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }

    std::array<uint64_t, 4> state_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace seqtest
