#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "multidraw/bitmat.hpp"
#include "multidraw/rng.hpp"

namespace multidraw {

inline std::size_t fullrank_trial_rows(std::size_t b, double delta) {
    if (delta < 0.0 || delta >= 1.0) throw std::invalid_argument("fullrank: delta must be in [0,1)");
    auto rows = static_cast<std::size_t>(std::floor((1.0 - delta) * static_cast<double>(b) + 1e-9));
    if (rows < 1) throw std::invalid_argument("fullrank: (1-delta)*B must round down to at least 1 row");
    return rows;
}

// Exact probability that a random floor((1-delta)B) x B Bernoulli(1/2)
// matrix has full row rank: prod_{j=1}^{rows} (1 - 2^-(B-j+1)).
inline double exact_fullrank_probability(std::size_t b, double delta) {
    std::size_t rows = fullrank_trial_rows(b, delta);
    double prod = 1.0;
    for (std::size_t j = 1; j <= rows; ++j) {
        prod *= 1.0 - std::exp2(-static_cast<double>(b - j + 1));
    }
    return prod;
}

// Limit of the square case (delta = 0): prod_{i>=1} (1 - 2^-i) = 0.28879...
inline double fullrank_limit_constant() {
    double prod = 1.0;
    for (int i = 1; i <= 64; ++i) prod *= 1.0 - std::exp2(-i);
    return prod;
}

// One trial: does a fresh random rows x B matrix have full row rank? Aborts
// as soon as an absorbed row turns out dependent on the earlier ones.
inline bool fullrank_single_trial(std::size_t b, std::size_t rows, Rng& rng) {
    Gf2Eliminator elim(b);
    std::size_t wpr = BitVector::word_count(b);
    std::uint64_t tail_mask = (b % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (b % 64)) - 1);
    std::vector<std::uint64_t> row(wpr);
    for (std::size_t r = 0; r < rows; ++r) {
        for (auto& w : row) w = rng.u64();
        row.back() &= tail_mask;
        elim.absorb(row);
        if (elim.rank() != r + 1) return false;
    }
    return true;
}

// Fraction of trials in which a fresh random floor((1-delta)B) x B matrix
// has full row rank.
inline double fullrank_probability_trial(std::size_t b, double delta, std::size_t trials, Rng& rng) {
    if (trials < 1) throw std::invalid_argument("fullrank_probability_trial: trials must be >= 1");
    std::size_t rows = fullrank_trial_rows(b, delta);
    std::size_t successes = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        if (fullrank_single_trial(b, rows, rng)) ++successes;
    }
    return static_cast<double>(successes) / static_cast<double>(trials);
}

}  // namespace multidraw
