#pragma once

#include <cstdint>

namespace twistor {

// SplitMix64.  Small, fast, and identical on every platform, which keeps
// reports byte-reproducible.  Results depend only on (seed, call sequence).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // uniform integer in [0, m)
    std::uint64_t below(std::uint64_t m) { return next_u64() % m; }

  private:
    std::uint64_t state_;
};

// Per-sample seed derivation: sample i of a batch uses seed ^ i, so batches
// are order-independent and safe to evaluate concurrently.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return seed ^ index;
}

} // namespace twistor
