#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace paradoxlens {

// SplitMix64 step. Used to hash seeds and derive substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic substream derivation: the stream index is folded into the
// seed through SplitMix64, so substreams are independent of execution order.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed ^ (stream * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL);
    return splitmix64(state);
}

// Random source for all stochastic code in the library. The engine is
// mt19937_64 (bit-exact across platforms per the standard); floating-point
// conversions are done explicitly here because std::*_distribution output
// is implementation defined.
class Rng {
public:
    static constexpr const char* algorithm = "mt19937_64+box-muller";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(substream_seed(seed, stream));
    }

    std::uint64_t next_u64() { return engine_(); }

    // uniform on [0, 1)
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // uniform on (0, 1]; safe as a log() argument
    double uniform_pos() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    bool coin(double p_true) { return uniform() < p_true; }

    // standard normal, Box-Muller (cosine branch)
    double normal() {
        const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        const double theta = 2.0 * std::numbers::pi * uniform();
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // zero-mean Laplace with the given scale (variance 2*scale^2)
    double laplace(double scale) {
        const double magnitude = -scale * std::log(uniform_pos());
        return coin(0.5) ? magnitude : -magnitude;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace paradoxlens
