#include "mcforge/gf2.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "mcforge/errors.hpp"

namespace mcforge {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw UsageError(what);
}

Word tail_mask(std::size_t bits) {
    const auto r = bits % word_bits;
    return r == 0 ? ~Word{0} : (Word{1} << r) - 1;
}

} // namespace

// ---------------------------------------------------------------- BitVector

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v(bits.size());
    for (std::size_t i = 0; i < bits.size(); ++i) {
        require(bits[i] == '0' || bits[i] == '1', "bit string must contain only 0/1");
        if (bits[i] == '1') v.set(i);
    }
    return v;
}

BitVector BitVector::from_indices(std::size_t len, std::span<const std::size_t> ones) {
    BitVector v(len);
    for (auto i : ones) {
        require(i < len, "bit index out of range");
        v.set(i);
    }
    return v;
}

BitVector BitVector::random(std::size_t len, Rng& rng) {
    BitVector v(len);
    for (auto& w : v.words_) w = rng.next();
    if (!v.words_.empty()) v.words_.back() &= tail_mask(len);
    return v;
}

std::size_t BitVector::weight() const noexcept {
    std::size_t w = 0;
    for (auto x : words_) w += static_cast<std::size_t>(std::popcount(x));
    return w;
}

bool BitVector::is_zero() const noexcept {
    return std::all_of(words_.begin(), words_.end(), [](Word w) { return w == 0; });
}

std::vector<std::size_t> BitVector::support() const {
    std::vector<std::size_t> out;
    for (std::size_t wi = 0; wi < words_.size(); ++wi) {
        Word w = words_[wi];
        while (w) {
            out.push_back(wi * word_bits + static_cast<std::size_t>(std::countr_zero(w)));
            w &= w - 1;
        }
    }
    return out;
}

bool BitVector::dot(const BitVector& o) const {
    require(len_ == o.len_, "dot: length mismatch");
    Word acc = 0;
    for (std::size_t i = 0; i < words_.size(); ++i) acc ^= words_[i] & o.words_[i];
    return std::popcount(acc) & 1;
}

BitVector& BitVector::operator^=(const BitVector& o) {
    require(len_ == o.len_, "xor: length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= o.words_[i];
    return *this;
}

BitVector& BitVector::operator&=(const BitVector& o) {
    require(len_ == o.len_, "and: length mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    return *this;
}

std::string BitVector::to_string() const {
    std::string s(len_, '0');
    for (std::size_t i = 0; i < len_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

// ---------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), stride_(words_for(cols)), data_(rows * words_for(cols), 0) {
    require(rows > 0 && cols > 0, "matrix dimensions must be positive");
}

BitMatrix BitMatrix::identity(std::size_t n) {
    BitMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i);
    return m;
}

BitMatrix BitMatrix::from_rows(std::span<const BitVector> rows) {
    require(!rows.empty(), "from_rows: no rows");
    BitMatrix m(rows.size(), rows[0].size());
    for (std::size_t r = 0; r < rows.size(); ++r) m.set_row(r, rows[r]);
    return m;
}

BitMatrix BitMatrix::from_strings(std::span<const std::string_view> rows) {
    std::vector<BitVector> v;
    v.reserve(rows.size());
    for (auto s : rows) v.push_back(BitVector::from_string(s));
    return from_rows(v);
}

BitVector BitMatrix::row(std::size_t r) const {
    BitVector v(cols_);
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(r * stride_), stride_, v.words().begin());
    return v;
}

BitVector BitMatrix::column(std::size_t c) const {
    BitVector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        if (get(r, c)) v.set(r);
    return v;
}

void BitMatrix::set_row(std::size_t r, const BitVector& v) {
    require(v.size() == cols_, "set_row: length mismatch");
    std::copy(v.words().begin(), v.words().end(), data_.begin() + static_cast<std::ptrdiff_t>(r * stride_));
}

void BitMatrix::xor_row_into(std::size_t src, std::size_t dst) {
    const Word* s = data_.data() + src * stride_;
    Word* d = data_.data() + dst * stride_;
    for (std::size_t i = 0; i < stride_; ++i) d[i] ^= s[i];
}

void BitMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(data_.begin() + static_cast<std::ptrdiff_t>(a * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>((a + 1) * stride_),
                     data_.begin() + static_cast<std::ptrdiff_t>(b * stride_));
}

BitMatrix BitMatrix::transpose() const {
    BitMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const Word* row = data_.data() + r * stride_;
        for (std::size_t wi = 0; wi < stride_; ++wi) {
            Word w = row[wi];
            while (w) {
                const auto c = wi * word_bits + static_cast<std::size_t>(std::countr_zero(w));
                t.set(c, r);
                w &= w - 1;
            }
        }
    }
    return t;
}

BitMatrix BitMatrix::select_columns(std::span<const std::size_t> cols) const {
    BitMatrix out(rows_, cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        require(cols[j] < cols_, "select_columns: index out of range");
        for (std::size_t r = 0; r < rows_; ++r)
            if (get(r, cols[j])) out.set(r, j);
    }
    return out;
}

BitMatrix BitMatrix::select_rows(std::span<const std::size_t> rows) const {
    BitMatrix out(rows.size(), cols_);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        require(rows[i] < rows_, "select_rows: index out of range");
        std::copy_n(row_span(rows[i]).begin(), stride_, out.row_span(i).begin());
    }
    return out;
}

BitMatrix BitMatrix::augment(const BitVector& column) const {
    require(column.size() == rows_, "augment: length mismatch");
    BitMatrix out(rows_, cols_ + 1);
    for (std::size_t r = 0; r < rows_; ++r) {
        std::copy_n(row_span(r).begin(), stride_, out.row_span(r).begin());
        if (column.get(r)) out.set(r, cols_);
    }
    return out;
}

bool BitMatrix::is_zero() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](Word w) { return w == 0; });
}

// ---------------------------------------------------------------- products

BitVector matvec(const BitMatrix& m, const BitVector& v) {
    require(v.size() == m.cols(), "matvec: dimension mismatch");
    BitVector out(m.rows());
    const auto vw = v.words();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row_span(r);
        Word acc = 0;
        for (std::size_t i = 0; i < row.size(); ++i) acc ^= row[i] & vw[i];
        if (std::popcount(acc) & 1) out.set(r);
    }
    return out;
}

BitVector vecmat(const BitVector& x, const BitMatrix& m) {
    require(x.size() == m.rows(), "vecmat: dimension mismatch");
    BitVector out(m.cols());
    auto ow = out.words();
    for (auto r : x.support()) {
        const auto row = m.row_span(r);
        for (std::size_t i = 0; i < row.size(); ++i) ow[i] ^= row[i];
    }
    return out;
}

BitMatrix multiply(const BitMatrix& a, const BitMatrix& b) {
    require(a.cols() == b.rows(), "multiply: dimension mismatch");
    BitMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto dst = out.row_span(r);
        const auto arow = a.row_span(r);
        for (std::size_t wi = 0; wi < arow.size(); ++wi) {
            Word w = arow[wi];
            while (w) {
                const auto k = wi * word_bits + static_cast<std::size_t>(std::countr_zero(w));
                const auto src = b.row_span(k);
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] ^= src[i];
                w &= w - 1;
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------- elimination

bool gauss_jordan_inplace(BitMatrix& a, std::span<const std::size_t> pivot_cols) {
    require(pivot_cols.size() <= a.rows(), "gauss_jordan: more pivots than rows");
    const std::size_t rows = a.rows();
    for (std::size_t r = 0; r < pivot_cols.size(); ++r) {
        const std::size_t c = pivot_cols[r];
        const std::size_t wi = c / word_bits;
        const Word bit = Word{1} << (c % word_bits);
        std::size_t p = r;
        while (p < rows && !(a.row_span(p)[wi] & bit)) ++p;
        if (p == rows) return false;
        a.swap_rows(r, p);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && (a.row_span(i)[wi] & bit)) a.xor_row_into(r, i);
    }
    return true;
}

EliminationResult gauss_jordan(BitMatrix a, std::span<const std::size_t> pivot_cols) {
    std::unordered_set<std::size_t> seen;
    for (auto c : pivot_cols) {
        require(c < a.cols(), "gauss_jordan: pivot column out of range");
        require(seen.insert(c).second, "gauss_jordan: duplicate pivot column");
    }
    const bool ok = gauss_jordan_inplace(a, pivot_cols);
    return {std::move(a), ok};
}

RowEchelon row_echelon(BitMatrix m) {
    RowEchelon out;
    std::size_t r = 0;
    const std::size_t rows = m.rows();
    for (std::size_t c = 0; c < m.cols() && r < rows; ++c) {
        const std::size_t wi = c / word_bits;
        const Word bit = Word{1} << (c % word_bits);
        std::size_t p = r;
        while (p < rows && !(m.row_span(p)[wi] & bit)) ++p;
        if (p == rows) continue;
        m.swap_rows(r, p);
        for (std::size_t i = 0; i < rows; ++i)
            if (i != r && (m.row_span(i)[wi] & bit)) m.xor_row_into(r, i);
        out.pivots.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto c : out.pivots) is_pivot[c] = true;
    for (std::size_t c = 0; c < m.cols(); ++c)
        if (!is_pivot[c]) out.free_cols.push_back(c);
    if (r > 0) {
        std::vector<std::size_t> keep(r);
        std::iota(keep.begin(), keep.end(), std::size_t{0});
        out.reduced = m.select_rows(keep);
    }
    return out;
}

RankKernel rank_and_kernel(const BitMatrix& m) {
    const auto ech = row_echelon(m);
    RankKernel out;
    out.rank = ech.pivots.size();
    out.kernel.reserve(ech.free_cols.size());
    for (auto f : ech.free_cols) {
        BitVector v(m.cols());
        v.set(f);
        for (std::size_t r = 0; r < ech.pivots.size(); ++r)
            if (ech.reduced.get(r, f)) v.set(ech.pivots[r]);
        out.kernel.push_back(std::move(v));
    }
    return out;
}

std::size_t rank(const BitMatrix& m) { return row_echelon(m).pivots.size(); }

std::optional<BitVector> solve_left(const BitMatrix& m, const BitVector& c) {
    require(c.size() == m.cols(), "solve_left: dimension mismatch");
    // x M = c  <=>  M^T x^T = c^T
    const auto ech = row_echelon(m.transpose().augment(c));
    const std::size_t unknowns = m.rows();
    if (!ech.pivots.empty() && ech.pivots.back() == unknowns) return std::nullopt;
    BitVector x(unknowns);
    for (std::size_t r = 0; r < ech.pivots.size(); ++r)
        if (ech.reduced.get(r, unknowns)) x.set(ech.pivots[r]);
    return x;
}

std::optional<BitMatrix> inverse(const BitMatrix& m) {
    require(m.rows() == m.cols(), "inverse: matrix is not square");
    const std::size_t n = m.rows();
    BitMatrix a(n, 2 * n);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c)
            if (m.get(r, c)) a.set(r, c);
        a.set(r, n + r);
    }
    std::vector<std::size_t> piv(n);
    std::iota(piv.begin(), piv.end(), std::size_t{0});
    if (!gauss_jordan_inplace(a, piv)) return std::nullopt;
    std::vector<std::size_t> right(n);
    std::iota(right.begin(), right.end(), n);
    return a.select_columns(right);
}

// ---------------------------------------------------------------- sampling

BitMatrix sample_matrix(std::size_t rows, std::size_t cols, Rng& rng) {
    BitMatrix m(rows, cols);
    const Word mask = tail_mask(cols);
    for (std::size_t r = 0; r < rows; ++r) {
        auto row = m.row_span(r);
        for (auto& w : row) w = rng.next();
        row.back() &= mask;
    }
    return m;
}

BitMatrix sample_invertible(std::size_t k, Rng& rng) {
    for (int trial = 0; trial < 1000; ++trial) {
        auto m = sample_matrix(k, k, rng);
        if (rank(m) == k) return m;
    }
    throw InternalError("sample_invertible: 1000 consecutive singular draws");
}

BitMatrix permutation_matrix(std::span<const std::size_t> perm) {
    BitMatrix m(perm.size(), perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) m.set(i, perm[i]);
    return m;
}

BitMatrix sample_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm.begin(), perm.end());
    return permutation_matrix(perm);
}

BitVector sample_weight(std::size_t n, std::size_t w, Rng& rng) {
    require(w <= n, "sample_weight: weight exceeds length");
    BitVector v(n);
    for (std::size_t j = n - w; j < n; ++j) {
        const auto r = static_cast<std::size_t>(rng.below(j + 1));
        if (v.get(r))
            v.set(j);
        else
            v.set(r);
    }
    return v;
}

// ---------------------------------------------------------------- hex

std::string to_hex(const BitVector& v) {
    static constexpr char digits[] = "0123456789abcdef";
    const std::size_t nbytes = (v.size() + 7) / 8;
    std::string out;
    out.reserve(2 * nbytes);
    const auto w = v.words();
    for (std::size_t b = 0; b < nbytes; ++b) {
        const auto byte = static_cast<unsigned>((w[b / 8] >> (8 * (b % 8))) & 0xffU);
        out.push_back(digits[byte >> 4]);
        out.push_back(digits[byte & 0xf]);
    }
    return out;
}

BitVector from_hex(std::string_view hex, std::size_t len) {
    const std::size_t nbytes = (len + 7) / 8;
    if (hex.size() != 2 * nbytes) throw UsageError("hex string has wrong length for " + std::to_string(len) + " bits");
    auto nibble = [](char c) -> unsigned {
        if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
        if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
        if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
        throw UsageError("invalid hex digit");
    };
    BitVector v(len);
    auto w = v.words();
    for (std::size_t b = 0; b < nbytes; ++b) {
        const Word byte = (nibble(hex[2 * b]) << 4) | nibble(hex[2 * b + 1]);
        w[b / 8] |= byte << (8 * (b % 8));
    }
    if (len % word_bits != 0 && (w.back() & ~tail_mask(len)) != 0)
        throw UsageError("hex string sets bits beyond the declared length");
    return v;
}

} // namespace mcforge
