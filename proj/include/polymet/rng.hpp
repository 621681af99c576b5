#pragma once

#include <cmath>
#include <cstdint>

namespace polymet {

// Counter-based generator: output k of stream (seed, stream_id) is the
// SplitMix64 finalizer applied to seed + golden-ratio increments. Stateless
// in the counter, so any draw is reproducible from (seed, stream, counter)
// alone and identical across platforms (pure 64-bit integer arithmetic).
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : base_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ull))) {}

    // Derives an independent stream; used to split suites deterministically.
    CounterRng split(std::uint64_t stream_tag) const {
        CounterRng r(0);
        r.base_ = mix(base_ ^ mix(stream_tag + 0xBF58476D1CE4E5B9ull));
        r.counter_ = 0;
        return r;
    }

    std::uint64_t next_u64() { return mix(base_ + (++counter_) * 0x9E3779B97F4A7C15ull); }

    // Uniform in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (two uniforms per call, cached pair not
    // kept so the draw count stays a pure function of call count).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t base_;
    std::uint64_t counter_ = 0;
};

}  // namespace polymet
