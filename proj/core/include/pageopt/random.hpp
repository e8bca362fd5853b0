#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace pageopt {

// Deterministic 64-bit PRNG (xoshiro256++) seeded through SplitMix64.
// Reconstructing a source from the same seed replays the same stream, and
// split() derives a child source whose seed is drawn from the parent stream,
// so fan-out (one source per worker / per replicate) stays reproducible.
// Determinism is promised within one build of this library, not across
// implementations of the underlying transcendental functions.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed = 0);

    std::uint64_t next_u64();

    /* uniform double in [0, 1) with 53 random bits */
    double uniform01();

    /* uniform double in (0, 1], safe to pass to log() */
    double uniform01_open_zero();

    /* unbiased uniform integer in [0, n) */
    std::uint64_t uniform_int(std::uint64_t n);

    /* uniform double in [lo, hi) */
    double uniform(double lo, double hi);

    /* standard normal via Box-Muller (one value per call) */
    double normal();

    /* true with probability p; requires 0 < p <= 1, so p == 1 always fires */
    bool bernoulli(double p);

    /* child source seeded from this stream */
    RandomSource split();

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t s_[4];
    std::uint64_t seed_;
};

// k indices from {0, ..., n-1}. With replacement: k i.i.d. uniform draws
// (k may exceed n). Without replacement: k distinct indices via a partial
// Fisher-Yates shuffle, requires k <= n.
std::vector<std::size_t> sample_indices(RandomSource& rng, std::size_t n, std::size_t k,
                                        bool with_replacement);

}  // namespace pageopt
