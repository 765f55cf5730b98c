#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace bwrk {

// Bit-avalanching 64-bit mix (SplitMix64 finalizer). Used both as the
// generator step and for deriving decorrelated stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// SplitMix64 stream. One word of state, identical output on every
// platform/compiler, which is what makes replay determinism cheap.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ull;
        return mix64(state_);
    }

    // uniform in [0, 1)
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("SplitMix64::below: n must be positive");
        // multiply-shift; bias is < 2^-64 per draw, irrelevant at simulation scale
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

private:
    std::uint64_t state_;
};

// Hash a sequence of words into one seed (order-sensitive).
inline std::uint64_t combine_seed(std::uint64_t h, std::uint64_t w) {
    return mix64(h ^ (w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
}

// Decorrelated sub-stream seed: same parent seed + different tag -> independent stream.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t tag) {
    return combine_seed(mix64(seed), tag);
}

// Sample an index from a probability vector (assumed to sum to ~1).
inline int sample_discrete(SplitMix64& rng, const std::vector<double>& probs) {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

} // namespace bwrk
