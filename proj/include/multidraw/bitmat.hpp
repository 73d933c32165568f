#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "multidraw/bitvec.hpp"
#include "multidraw/rng.hpp"

namespace multidraw {

// Dense row-major bit matrix over F2. Rows are packed into 64-bit words;
// bits past cols() in the last word of each row stay zero.
class BitMatrix {
  public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), wpr_(BitVector::word_count(cols)), words_(rows * wpr_, 0) {}

    static BitMatrix identity(std::size_t n) {
        BitMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
        return m;
    }

    static BitMatrix from_rows(const std::vector<std::string>& rows) {
        std::size_t cols = rows.empty() ? 0 : rows.front().size();
        BitMatrix m(rows.size(), cols);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != cols) throw std::invalid_argument("BitMatrix::from_rows: ragged rows");
            for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c] == '1');
        }
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t words_per_row() const { return wpr_; }

    bool get(std::size_t r, std::size_t c) const {
        check_(r, c);
        return (words_[r * wpr_ + c / 64] >> (c % 64)) & 1u;
    }

    void set(std::size_t r, std::size_t c, bool value) {
        check_(r, c);
        std::uint64_t mask = std::uint64_t{1} << (c % 64);
        if (value) words_[r * wpr_ + c / 64] |= mask;
        else words_[r * wpr_ + c / 64] &= ~mask;
    }

    std::span<const std::uint64_t> row(std::size_t r) const {
        if (r >= rows_) throw std::out_of_range("BitMatrix::row: row index out of range");
        return {words_.data() + r * wpr_, wpr_};
    }

    std::span<std::uint64_t> row(std::size_t r) {
        if (r >= rows_) throw std::out_of_range("BitMatrix::row: row index out of range");
        return {words_.data() + r * wpr_, wpr_};
    }

    BitVector row_vector(std::size_t r) const {
        BitVector v(cols_);
        auto src = row(r);
        for (std::size_t w = 0; w < wpr_; ++w) v.words()[w] = src[w];
        return v;
    }

    friend bool operator==(const BitMatrix& a, const BitMatrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.words_ == b.words_;
    }

  private:
    void check_(std::size_t r, std::size_t c) const {
        if (r >= rows_ || c >= cols_) throw std::out_of_range("BitMatrix: index out of range");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t wpr_ = 0;
    std::vector<std::uint64_t> words_;
};

// Each entry i.i.d. Bernoulli(1/2); identical seed gives identical matrix.
inline BitMatrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    BitMatrix m(rows, cols);
    if (cols == 0) return m;
    std::size_t wpr = m.words_per_row();
    std::uint64_t tail_mask = (cols % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (cols % 64)) - 1);
    for (std::size_t r = 0; r < rows; ++r) {
        auto dst = m.row(r);
        for (std::size_t w = 0; w < wpr; ++w) dst[w] = rng.u64();
        dst[wpr - 1] &= tail_mask;
    }
    return m;
}

inline BitVector random_vector(std::size_t len, Rng& rng) {
    BitVector v(len);
    if (len == 0) return v;
    std::uint64_t tail_mask = (len % 64 == 0) ? ~std::uint64_t{0} : ((std::uint64_t{1} << (len % 64)) - 1);
    for (auto& w : v.words()) w = rng.u64();
    v.words().back() &= tail_mask;
    return v;
}

inline BitVector mat_vec_mul(const BitMatrix& a, const BitVector& x) {
    if (a.cols() != x.len()) throw std::invalid_argument("mat_vec_mul: dimension mismatch");
    BitVector y(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto row = a.row(r);
        std::uint64_t acc = 0;
        for (std::size_t w = 0; w < row.size(); ++w) acc ^= row[w] & x.words()[w];
        if (std::popcount(acc) & 1) y.set(r, true);
    }
    return y;
}

// Row i of the result is row indices[i] of a; duplicates are permitted.
inline BitMatrix select_rows(const BitMatrix& a, const std::vector<std::size_t>& indices) {
    BitMatrix out(indices.size(), a.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= a.rows()) throw std::out_of_range("select_rows: row index out of range");
        auto src = a.row(indices[i]);
        auto dst = out.row(i);
        for (std::size_t w = 0; w < src.size(); ++w) dst[w] = src[w];
    }
    return out;
}

enum class SolveStatus { Unique, Multiple, Inconsistent };

struct SolveReport {
    SolveStatus status = SolveStatus::Inconsistent;
    // One solution; present for Unique (the solution) and Multiple (any one).
    std::optional<BitVector> witness;
};

// Incremental Gaussian elimination over F2, in reduced row-echelon form.
// Rows are absorbed one at a time (optionally with an augmented bit) and the
// current rank is queryable between absorptions, so callers can prune a
// search as soon as a system turns inconsistent. Single-owner, not shared.
class Gf2Eliminator {
  public:
    explicit Gf2Eliminator(std::size_t cols)
        : cols_(cols), wpr_(BitVector::word_count(cols)), pivot_row_of_col_(cols, kNoRow) {}

    std::size_t cols() const { return cols_; }
    std::size_t rank() const { return pivot_cols_.size(); }
    bool contradiction() const { return contradiction_; }

    void absorb(std::span<const std::uint64_t> row_words, bool rhs = false) {
        if (row_words.size() != wpr_) throw std::invalid_argument("Gf2Eliminator::absorb: row width mismatch");
        scratch_.assign(row_words.begin(), row_words.end());
        reduce_(scratch_, rhs);
        if (auto piv = leading_bit_(scratch_)) {
            eliminate_from_existing_(*piv, scratch_, rhs);
            pivot_row_of_col_[*piv] = rows_.size();
            pivot_cols_.push_back(*piv);
            rows_.push_back(scratch_);
            rhs_.push_back(rhs);
        } else if (rhs) {
            contradiction_ = true;  // 0 = 1
        }
    }

    void absorb(const BitVector& row, bool rhs = false) {
        if (row.len() != cols_) throw std::invalid_argument("Gf2Eliminator::absorb: row length mismatch");
        absorb(std::span<const std::uint64_t>(row.words().data(), row.words().size()), rhs);
    }

    // Trichotomy over the absorbed system. Unique iff consistent and every
    // column is a pivot; the witness sets free variables to zero.
    SolveReport report() const {
        SolveReport rep;
        if (contradiction_) {
            rep.status = SolveStatus::Inconsistent;
            return rep;
        }
        rep.status = (rank() == cols_) ? SolveStatus::Unique : SolveStatus::Multiple;
        BitVector x(cols_);
        for (std::size_t i = 0; i < pivot_cols_.size(); ++i) {
            if (rhs_[i]) x.set(pivot_cols_[i], true);  // rows are fully reduced
        }
        rep.witness = std::move(x);
        return rep;
    }

  private:
    static constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

    void reduce_(std::vector<std::uint64_t>& row, bool& rhs) const {
        for (std::size_t w = 0; w < wpr_; ++w) {
            std::uint64_t bits = row[w];
            while (bits) {
                std::size_t c = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                std::size_t pr = pivot_row_of_col_[c];
                if (pr == kNoRow) {
                    bits &= bits - 1;
                    continue;
                }
                const auto& prow = rows_[pr];
                for (std::size_t k = w; k < wpr_; ++k) row[k] ^= prow[k];
                rhs ^= rhs_[pr];
                bits = row[w];
            }
        }
    }

    std::optional<std::size_t> leading_bit_(const std::vector<std::uint64_t>& row) const {
        for (std::size_t w = 0; w < wpr_; ++w) {
            if (row[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(row[w]));
        }
        return std::nullopt;
    }

    void eliminate_from_existing_(std::size_t pivot_col, const std::vector<std::uint64_t>& row, bool rhs) {
        std::size_t w = pivot_col / 64;
        std::uint64_t mask = std::uint64_t{1} << (pivot_col % 64);
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (rows_[i][w] & mask) {
                for (std::size_t k = 0; k < wpr_; ++k) rows_[i][k] ^= row[k];
                rhs_[i] = rhs_[i] ^ rhs;
            }
        }
    }

    std::size_t cols_;
    std::size_t wpr_;
    std::vector<std::size_t> pivot_row_of_col_;
    std::vector<std::vector<std::uint64_t>> rows_;
    std::vector<bool> rhs_;
    std::vector<std::size_t> pivot_cols_;
    std::vector<std::uint64_t> scratch_;
    bool contradiction_ = false;
};

// Dimension of the row space; the input is never modified.
inline std::size_t rank(const BitMatrix& a) {
    Gf2Eliminator elim(a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) elim.absorb(a.row(r));
    return elim.rank();
}

inline SolveReport solve(const BitMatrix& a, const BitVector& y) {
    if (a.rows() != y.len()) throw std::invalid_argument("solve: dimension mismatch");
    Gf2Eliminator elim(a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) elim.absorb(a.row(r), y.get(r));
    return elim.report();
}

}  // namespace multidraw
