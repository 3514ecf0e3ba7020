#ifndef KATOKLAB_RNG_HPP
#define KATOKLAB_RNG_HPP

#include <cstdint>

namespace katoklab {

// Counter-based generator: every draw is a pure function of
// (seed, stream, counter), so parallel sampling is reproducible and
// independent of thread scheduling.
class CounterRng {
public:
    CounterRng(uint64_t seed, uint64_t stream)
        : state_(mix(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)))) {}

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform in [0, 1)
    double next_double() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform in [a, b)
    double uniform(double a, double b) { return a + (b - a) * next_double(); }

    static uint64_t mix(uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27; z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

private:
    uint64_t state_;
};

// One-shot draw indexed by sample number; used by data-parallel loops.
inline CounterRng rng_for(uint64_t seed, uint64_t stream, uint64_t sample) {
    return CounterRng(seed ^ CounterRng::mix(sample + 0x5851f42d4c957f2dULL), stream);
}

} // namespace katoklab

#endif
