#pragma once

#include <cstdint>
#include <random>

namespace pricesim {

// 64-bit finalizer from splitmix64; spreads structured inputs (seeds mixed
// with small indices) over the whole state space.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Stable seed for one unit of work, e.g. (base, policy, model, replication).
// Pure integer mixing, so the same inputs give the same seed everywhere.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = mix64(base);
    h = mix64(h ^ a);
    h = mix64(h ^ b);
    h = mix64(h ^ c);
    return h;
}

// Seeded generator with hand-rolled draw mappings. The raw mt19937_64 output
// sequence is pinned down by the standard, but the <random> distribution
// adaptors are not; mapping draws manually keeps results byte-identical
// across standard libraries, which the determinism contract requires.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1), 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform in {0, ..., n-1}; rejects the wrap-around range so the result
    // is exactly uniform, not just approximately.
    std::size_t uniform_index(std::size_t n) {
        const std::uint64_t bound = n;
        const std::uint64_t reject_below = (0 - bound) % bound;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = gen_();
            if (r >= reject_below) return static_cast<std::size_t>(r % bound);
        }
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace pricesim
