#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace multidraw {

// Dense bit vector over F2, packed into 64-bit words. Bits past len() are
// kept zero so word-wise equality, XOR and popcount need no tail handling.
class BitVector {
  public:
    static constexpr std::size_t kWordBits = 64;

    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(word_count(len), 0) {}

    static std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }

    static BitVector from_string(const std::string& s) {
        BitVector v(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] == '1') v.set(i, true);
            else if (s[i] != '0') throw std::invalid_argument("BitVector::from_string: expected '0' or '1'");
        }
        return v;
    }

    std::size_t len() const { return len_; }
    const std::vector<std::uint64_t>& words() const { return words_; }
    std::vector<std::uint64_t>& words() { return words_; }

    bool get(std::size_t i) const {
        check_index_(i);
        return (words_[i / kWordBits] >> (i % kWordBits)) & 1u;
    }

    void set(std::size_t i, bool value) {
        check_index_(i);
        std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
        if (value) words_[i / kWordBits] |= mask;
        else words_[i / kWordBits] &= ~mask;
    }

    void xor_assign(const BitVector& other) {
        if (other.len_ != len_) throw std::invalid_argument("BitVector::xor_assign: length mismatch");
        for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
    }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (std::uint64_t w : words_) n += static_cast<std::size_t>(std::popcount(w));
        return n;
    }

    bool any() const {
        for (std::uint64_t w : words_) if (w) return true;
        return false;
    }

    std::string to_string() const {
        std::string s(len_, '0');
        for (std::size_t i = 0; i < len_; ++i) if (get(i)) s[i] = '1';
        return s;
    }

    friend bool operator==(const BitVector& a, const BitVector& b) {
        return a.len_ == b.len_ && a.words_ == b.words_;
    }

  private:
    void check_index_(std::size_t i) const {
        if (i >= len_) throw std::out_of_range("BitVector: bit index out of range");
    }

    std::size_t len_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitVectorHash {
    std::size_t operator()(const BitVector& v) const {
        std::uint64_t h = 0xcbf29ce484222325ULL ^ v.len();
        for (std::uint64_t w : v.words()) {
            h ^= w;
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace multidraw
