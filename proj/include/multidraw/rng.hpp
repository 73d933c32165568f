#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace multidraw {

// Counter-based seed derivation: a root seed expands into independent
// per-trial (or per-cell) seeds so trials can run in parallel and still
// reproduce bit-exactly when replayed in isolation.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index) {
    return mix64(root ^ mix64(index + 1));
}

// Seeded random source. All randomness in the library flows through this
// wrapper; distributions are hand-rolled on top of the raw 64-bit stream so
// outputs do not depend on implementation-defined standard distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t u64() { return engine_(); }

    // Uniform in [0, 1) with 53 random bits.
    double real01() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return real01() < p; }

    // Uniform in [0, n), unbiased via rejection on a power-of-two mask.
    std::uint64_t below(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> std::countl_zero(n - 1);
        for (;;) {
            std::uint64_t v = u64() & mask;
            if (v < n) return v;
        }
    }

    template <typename Seq>
    void shuffle(Seq& seq) {
        for (std::size_t i = seq.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(seq[i - 1], seq[j]);
        }
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace multidraw
