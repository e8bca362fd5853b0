#include "pageopt/random.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace pageopt {

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : s_) word = splitmix64(sm);
    // xoshiro must not start from the all-zero state; SplitMix64 expansion of
    // any seed practically never produces it, but guard anyway
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RandomSource::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RandomSource::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::uniform01_open_zero() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t RandomSource::uniform_int(std::uint64_t n) {
    if (n == 0)
        throw std::invalid_argument("RandomSource::uniform_int: n must be positive");
    // Lemire's multiply-shift with the rejection fix-up for exact uniformity
    __uint128_t m = static_cast<__uint128_t>(next_u64()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0ULL - n) % n;
        while (low < threshold) {
            m = static_cast<__uint128_t>(next_u64()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double RandomSource::uniform(double lo, double hi) {
    if (!(lo < hi))
        throw std::invalid_argument("RandomSource::uniform: need lo < hi");
    return lo + (hi - lo) * uniform01();
}

double RandomSource::normal() {
    const double u1 = uniform01_open_zero();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

bool RandomSource::bernoulli(double p) {
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("RandomSource::bernoulli: p must be in (0, 1]");
    return uniform01() < p;
}

RandomSource RandomSource::split() {
    return RandomSource(next_u64());
}

std::vector<std::size_t> sample_indices(RandomSource& rng, std::size_t n, std::size_t k,
                                        bool with_replacement) {
    if (n == 0)
        throw std::invalid_argument("sample_indices: n must be positive");
    std::vector<std::size_t> out;
    out.reserve(k);
    if (with_replacement) {
        for (std::size_t j = 0; j < k; ++j)
            out.push_back(static_cast<std::size_t>(rng.uniform_int(n)));
        return out;
    }
    if (k > n)
        throw std::invalid_argument("sample_indices: k > n without replacement");
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t j = 0; j < k; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(rng.uniform_int(n - j));
        std::swap(pool[j], pool[pick]);
        out.push_back(pool[j]);
    }
    return out;
}

}  // namespace pageopt
