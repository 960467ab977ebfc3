#pragma once
#include <cstdint>

namespace lmul {

// splitmix64 finalizer, used for seeding and substream derivation.
inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// xorshift64* generator. All randomness in the project flows through this
// class so that independent implementations can reproduce every output file
// byte for byte. The construction is:
//
//   state0           = splitmix64(seed)            (0 maps to 0x9E3779B97F4A7C15)
//   next():            s ^= s >> 12; s ^= s << 25; s ^= s >> 27;
//                      return s * 0x2545F4914F6CDD1D
//   substream(seed,i): state0 = splitmix64(splitmix64(seed) + i)
//
// Substreams give each sample index its own generator, so Monte Carlo loops
// can be partitioned across workers without changing any draw.
class Xorshift64Star {
public:
    explicit Xorshift64Star(uint64_t seed) : state_(guard(splitmix64(seed))) {}

    static Xorshift64Star substream(uint64_t seed, uint64_t index) {
        Xorshift64Star g(0);
        g.state_ = guard(splitmix64(splitmix64(seed) + index));
        return g;
    }

    uint64_t next() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545F4914F6CDD1Dull;
    }

    // Uniform in [0,1) with 53 random bits.
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    // Uniform in [-1,1).
    double next_symmetric() { return 2.0 * next_unit() - 1.0; }

    // Uniform integer in [0,n), computed as floor(next * n / 2^64).
    uint64_t next_below(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

private:
    static uint64_t guard(uint64_t s) { return s == 0 ? 0x9E3779B97F4A7C15ull : s; }
    uint64_t state_;
};

} // namespace lmul
