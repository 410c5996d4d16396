#pragma once

// Dense bit-packed linear algebra over GF(2).
//
// Bit j of a vector lives in word j / 64 at position j % 64 (LSB first).
// Matrices are row-major, each row laid out like a BitVector. Bits past the
// logical length of a row are always zero, so word-wise popcounts and
// comparisons never need masking.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcforge/rng.hpp"

namespace mcforge {

using Word = std::uint64_t;
inline constexpr std::size_t word_bits = 64;

constexpr std::size_t words_for(std::size_t bits) { return (bits + word_bits - 1) / word_bits; }

class BitVector {
public:
    BitVector() = default;
    explicit BitVector(std::size_t len) : len_(len), words_(words_for(len), 0) {}

    static BitVector from_string(std::string_view bits); // "1011..." bit 0 first
    static BitVector from_indices(std::size_t len, std::span<const std::size_t> ones);
    static BitVector random(std::size_t len, Rng& rng);

    std::size_t size() const noexcept { return len_; }
    bool empty() const noexcept { return len_ == 0; }

    bool get(std::size_t i) const { return (words_[i / word_bits] >> (i % word_bits)) & 1U; }
    bool operator[](std::size_t i) const { return get(i); }
    void set(std::size_t i, bool v = true) {
        const Word m = Word{1} << (i % word_bits);
        if (v)
            words_[i / word_bits] |= m;
        else
            words_[i / word_bits] &= ~m;
    }
    void flip(std::size_t i) { words_[i / word_bits] ^= Word{1} << (i % word_bits); }

    std::size_t weight() const noexcept;
    bool is_zero() const noexcept;
    std::vector<std::size_t> support() const;

    /// Parity of the AND with another vector of the same length.
    bool dot(const BitVector& o) const;

    BitVector& operator^=(const BitVector& o);
    BitVector& operator&=(const BitVector& o);
    friend BitVector operator^(BitVector a, const BitVector& b) { return a ^= b; }
    friend BitVector operator&(BitVector a, const BitVector& b) { return a &= b; }
    bool operator==(const BitVector& o) const = default;

    std::span<Word> words() noexcept { return words_; }
    std::span<const Word> words() const noexcept { return words_; }

    std::string to_string() const;

private:
    std::size_t len_ = 0;
    std::vector<Word> words_;
};

class BitMatrix {
public:
    BitMatrix() = default;
    BitMatrix(std::size_t rows, std::size_t cols);

    static BitMatrix identity(std::size_t n);
    static BitMatrix from_rows(std::span<const BitVector> rows);
    static BitMatrix from_strings(std::span<const std::string_view> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t row_words() const noexcept { return stride_; }

    bool get(std::size_t r, std::size_t c) const {
        return (data_[r * stride_ + c / word_bits] >> (c % word_bits)) & 1U;
    }
    void set(std::size_t r, std::size_t c, bool v = true) {
        Word& w = data_[r * stride_ + c / word_bits];
        const Word m = Word{1} << (c % word_bits);
        if (v)
            w |= m;
        else
            w &= ~m;
    }
    void flip(std::size_t r, std::size_t c) { data_[r * stride_ + c / word_bits] ^= Word{1} << (c % word_bits); }

    std::span<Word> row_span(std::size_t r) noexcept { return {data_.data() + r * stride_, stride_}; }
    std::span<const Word> row_span(std::size_t r) const noexcept { return {data_.data() + r * stride_, stride_}; }

    BitVector row(std::size_t r) const;
    BitVector column(std::size_t c) const;
    void set_row(std::size_t r, const BitVector& v);
    void xor_row_into(std::size_t src, std::size_t dst);
    void swap_rows(std::size_t a, std::size_t b);

    BitMatrix transpose() const;
    BitMatrix select_columns(std::span<const std::size_t> cols) const;
    BitMatrix select_rows(std::span<const std::size_t> rows) const;
    /// (this | v) with v appended as the last column.
    BitMatrix augment(const BitVector& column) const;

    bool is_zero() const noexcept;
    bool operator==(const BitMatrix& o) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::size_t stride_ = 0;
    std::vector<Word> data_;
};

/// M v: bit i of the result is the parity of row i AND v.
BitVector matvec(const BitMatrix& m, const BitVector& v);
/// x M: XOR of the rows of M selected by x.
BitVector vecmat(const BitVector& x, const BitMatrix& m);
BitMatrix multiply(const BitMatrix& a, const BitMatrix& b);

struct EliminationResult {
    BitMatrix reduced;
    bool full_rank = false;
};

/// Gauss-Jordan elimination using pivot_cols[i] as the pivot of row i. On
/// success row i of the result has its single pivot-column 1 at pivot_cols[i];
/// row operations act on every column, augmented ones included. The pivot row
/// for each column is the lowest-index row at or below the current one.
EliminationResult gauss_jordan(BitMatrix a, std::span<const std::size_t> pivot_cols);

/// In-place variant used by hot loops; returns false as soon as a pivot
/// column has no usable row (the matrix is then partially reduced).
bool gauss_jordan_inplace(BitMatrix& a, std::span<const std::size_t> pivot_cols);

struct RowEchelon {
    BitMatrix reduced;                  // reduced row echelon form, zero rows dropped
    std::vector<std::size_t> pivots;    // pivot column of each kept row
    std::vector<std::size_t> free_cols; // complement of pivots, ascending
};

RowEchelon row_echelon(BitMatrix m);

struct RankKernel {
    std::size_t rank = 0;
    std::vector<BitVector> kernel; // basis of {v : M v = 0}
};

/// Kernel vectors are systematic: basis vector i has a single 1 among the
/// free columns, at free_cols[i].
RankKernel rank_and_kernel(const BitMatrix& m);
std::size_t rank(const BitMatrix& m);

/// Some x with x M == c, or nullopt if c is not in the row space.
std::optional<BitVector> solve_left(const BitMatrix& m, const BitVector& c);
/// Inverse of a square matrix, or nullopt if singular.
std::optional<BitMatrix> inverse(const BitMatrix& m);

BitMatrix sample_matrix(std::size_t rows, std::size_t cols, Rng& rng);
/// Rejection-samples until full rank; more than 1000 rejections means the rng is broken.
BitMatrix sample_invertible(std::size_t k, Rng& rng);
BitMatrix sample_permutation(std::size_t n, Rng& rng);
BitMatrix permutation_matrix(std::span<const std::size_t> perm); // row i has its 1 at perm[i]

/// Uniform vector of length n with exactly w ones (Floyd's algorithm).
BitVector sample_weight(std::size_t n, std::size_t w, Rng& rng);

// Hex layout: ceil(len/8) bytes, bit j = (byte[j/8] >> (j%8)) & 1, two
// lowercase hex digits per byte in byte order.
std::string to_hex(const BitVector& v);
BitVector from_hex(std::string_view hex, std::size_t len);

} // namespace mcforge
