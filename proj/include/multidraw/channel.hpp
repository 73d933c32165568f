#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "multidraw/bitvec.hpp"
#include "multidraw/rng.hpp"
#include "multidraw/sampling.hpp"

namespace multidraw {

// Channel geometry: M strands of L bits each, erasure probability p, and the
// normalized length beta = L / log2(M).
struct ChannelParams {
    std::size_t strand_count = 0;  // M
    std::size_t strand_bits = 0;   // L
    double erasure_prob = 0.0;     // p
    double beta = 0.0;             // L / log2(M)

    static ChannelParams from_lengths(std::size_t m, std::size_t l, double p) {
        check_common_(m, p);
        if (l == 0) throw std::invalid_argument("ChannelParams: L must be positive");
        ChannelParams cp;
        cp.strand_count = m;
        cp.strand_bits = l;
        cp.erasure_prob = p;
        cp.beta = static_cast<double>(l) / std::log2(static_cast<double>(m));
        return cp;
    }

    static ChannelParams from_beta(std::size_t m, double beta, double p) {
        check_common_(m, p);
        if (!(beta > 0.0)) throw std::invalid_argument("ChannelParams: beta must be positive");
        auto l = static_cast<std::size_t>(std::llround(beta * std::log2(static_cast<double>(m))));
        if (l == 0) l = 1;
        return from_lengths(m, l, p);
    }

    std::size_t total_bits() const { return strand_count * strand_bits; }  // ML

  private:
    static void check_common_(std::size_t m, double p) {
        if (m < 2) throw std::invalid_argument("ChannelParams: M must be at least 2");
        if (p < 0.0 || p > 1.0) throw std::invalid_argument("ChannelParams: p must be in [0,1]");
    }
};

enum class Symbol : std::uint8_t { Zero = 0, One = 1, Erased = 2 };

// A length-L sequence over {0, 1, erased}, stored as a value plane and a
// non-erased mask. Erased positions always carry value bit 0, so consistency
// and consensus reduce to word-wise logic.
class Strand {
  public:
    Strand() = default;
    explicit Strand(std::size_t len) : values_(len), known_(len) {}
    Strand(BitVector values, BitVector known)
        : values_(std::move(values)), known_(std::move(known)) {
        if (values_.len() != known_.len()) throw std::invalid_argument("Strand: plane length mismatch");
        for (std::size_t w = 0; w < values_.words().size(); ++w) {
            if (values_.words()[w] & ~known_.words()[w]) throw std::invalid_argument("Strand: erased position carries a value");
        }
    }

    // "01e" with 'e' for an erased symbol.
    static Strand from_string(const std::string& s) {
        Strand st(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            switch (s[i]) {
                case '0': st.set_symbol(i, Symbol::Zero); break;
                case '1': st.set_symbol(i, Symbol::One); break;
                case 'e': st.set_symbol(i, Symbol::Erased); break;
                default: throw std::invalid_argument("Strand::from_string: expected '0', '1' or 'e'");
            }
        }
        return st;
    }

    static Strand random(std::size_t len, Rng& rng) {
        Strand st(len);
        std::uint64_t tail = (len % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (len % 64)) - 1);
        if (len > 0) {
            for (auto& w : st.values_.words()) w = rng.u64();
            st.values_.words().back() &= tail;
            for (auto& w : st.known_.words()) w = ~std::uint64_t{0};
            st.known_.words().back() &= tail;
        }
        return st;
    }

    std::size_t len() const { return values_.len(); }
    const BitVector& values() const { return values_; }
    const BitVector& known() const { return known_; }

    Symbol symbol(std::size_t i) const {
        if (!known_.get(i)) return Symbol::Erased;
        return values_.get(i) ? Symbol::One : Symbol::Zero;
    }

    void set_symbol(std::size_t i, Symbol s) {
        known_.set(i, s != Symbol::Erased);
        values_.set(i, s == Symbol::One);
    }

    std::size_t erasure_count() const { return len() - known_.popcount(); }
    bool all_erased() const { return !known_.any(); }
    bool erasure_free() const { return known_.popcount() == len(); }

    // Independently erase each symbol with probability p.
    Strand erased_copy(double p, Rng& rng) const {
        Strand out = *this;
        for (std::size_t i = 0; i < len(); ++i) {
            if (rng.bernoulli(p)) out.set_symbol(i, Symbol::Erased);
        }
        return out;
    }

    std::string to_string() const {
        std::string s(len(), '?');
        for (std::size_t i = 0; i < len(); ++i) {
            Symbol sym = symbol(i);
            s[i] = sym == Symbol::Erased ? 'e' : (sym == Symbol::One ? '1' : '0');
        }
        return s;
    }

    friend bool operator==(const Strand& a, const Strand& b) {
        return a.values_ == b.values_ && a.known_ == b.known_;
    }

  private:
    BitVector values_;
    BitVector known_;
};

// Decoder-facing view of the channel output: reads only, no origin tags.
struct ReadsView {
    const std::vector<Strand>* reads = nullptr;

    std::size_t size() const { return reads->size(); }
    const Strand& operator[](std::size_t i) const { return (*reads)[i]; }
};

// Shuffled channel output. Origin tags are recorded for the genie decoder
// and edge statistics only; everything else goes through view().
struct ReadPool {
    std::vector<Strand> reads;
    std::vector<std::size_t> origins;  // input index of each read

    ReadsView view() const { return ReadsView{&reads}; }
};

// Draw each input strand N_i ~ Q times, erase each symbol of each copy
// independently with probability p, and shuffle the pool uniformly.
inline ReadPool transmit(const std::vector<Strand>& input, const ChannelParams& params,
                         const SamplingDistribution& dist, Rng& rng) {
    if (input.size() != params.strand_count) throw std::invalid_argument("transmit: expected M input strands");
    for (const auto& s : input) {
        if (s.len() != params.strand_bits) throw std::invalid_argument("transmit: input strand has wrong length");
        if (!s.erasure_free()) throw std::invalid_argument("transmit: input strands must be erasure-free");
    }
    ReadPool pool;
    std::vector<std::size_t> counts = sample_draw_counts(dist, params.strand_count, rng);
    for (std::size_t i = 0; i < input.size(); ++i) {
        for (std::size_t c = 0; c < counts[i]; ++c) {
            pool.reads.push_back(input[i].erased_copy(params.erasure_prob, rng));
            pool.origins.push_back(i);
        }
    }
    std::vector<std::size_t> perm(pool.reads.size());
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    ReadPool shuffled;
    shuffled.reads.reserve(perm.size());
    shuffled.origins.reserve(perm.size());
    for (std::size_t idx : perm) {
        shuffled.reads.push_back(std::move(pool.reads[idx]));
        shuffled.origins.push_back(pool.origins[idx]);
    }
    return shuffled;
}

}  // namespace multidraw
