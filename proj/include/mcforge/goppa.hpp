#pragma once

// Binary Goppa codes: construction from (g, support), random sampling, and
// Patterson decoding up to t = deg g errors.

#include <cstddef>
#include <memory>
#include <vector>

#include "mcforge/gf2.hpp"
#include "mcforge/gf2m.hpp"
#include "mcforge/rng.hpp"

namespace mcforge {

struct GoppaCode {
    std::shared_ptr<const FieldContext> field;
    FieldPoly g;                   // irreducible, degree t
    std::vector<Element> support;  // N distinct elements, none a root of g
    BitMatrix H;                   // (N-k) x N parity check, full row rank
    BitMatrix G;                   // k x N generator, identity on info_cols
    std::vector<std::size_t> info_cols;
    std::vector<FieldPoly> inv_linear; // (x + support[j])^-1 mod g
    std::size_t n = 0;
    std::size_t k = 0;
    unsigned t = 0;

    BitVector encode(const BitVector& message) const { return vecmat(message, G); }
    /// Inverse of encode for codewords: reads the information columns.
    BitVector message_of(const BitVector& codeword) const;
    BitVector syndrome(const BitVector& y) const { return matvec(H, y); }
};

/// Expands the GF(2^m) check matrix alpha_j^i / g(alpha_j) (i < t) over the
/// polynomial basis, row-reduces it to H and takes G as a kernel basis.
GoppaCode build_code(std::shared_ptr<const FieldContext> field, FieldPoly g, std::vector<Element> support);

struct CodeSample {
    GoppaCode code;
    unsigned attempts = 0;
};

/// Resamples g and the support until k == N - t m exactly; 100 consecutive
/// rejections throw InternalError.
CodeSample sample_code_counted(std::shared_ptr<const FieldContext> field, std::size_t n, unsigned t, Rng& rng);
GoppaCode sample_code(std::size_t n, unsigned t, unsigned m, Rng& rng);

/// Patterson decoding. Returns the error e (weight <= t) with y + e a
/// codeword; throws DecodeFailure when y is outside the correction radius.
BitVector decode(const BitVector& y, const GoppaCode& code);

} // namespace mcforge
