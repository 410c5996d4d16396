#pragma once

// Arithmetic in GF(2^m) and in GF(2^m)[x].

#include <cstdint>
#include <vector>

#include "mcforge/rng.hpp"

namespace mcforge {

using Element = std::uint32_t;

/// GF(2^m) in polynomial basis. Elements are m-bit integers whose bit i is
/// the coefficient of z^i. Immutable after construction.
class FieldContext {
public:
    /// Uses the lexicographically least irreducible degree-m polynomial over GF(2).
    explicit FieldContext(unsigned m);
    /// Throws UsageError if reduction_poly is not irreducible of degree m.
    FieldContext(unsigned m, std::uint32_t reduction_poly);

    unsigned m() const noexcept { return m_; }
    std::uint32_t reduction_poly() const noexcept { return poly_; }
    std::uint32_t size() const noexcept { return std::uint32_t{1} << m_; }

    Element add(Element a, Element b) const noexcept { return a ^ b; }
    Element mul(Element a, Element b) const noexcept {
        if (!log_.empty()) {
            if (a == 0 || b == 0) return 0;
            return exp_[log_[a] + log_[b]];
        }
        return clmul_reduce(a, b);
    }
    Element sqr(Element a) const noexcept { return mul(a, a); }
    Element inv(Element a) const; // DomainError for a == 0
    Element div(Element a, Element b) const { return mul(a, inv(b)); }
    Element pow(Element a, std::uint64_t e) const noexcept;
    /// Unique square root (Frobenius is a bijection in characteristic 2).
    Element sqrt(Element a) const noexcept;

    /// Carry-less multiply followed by reduction; the table-free path.
    Element clmul_reduce(Element a, Element b) const noexcept;

    static std::uint32_t default_reduction_poly(unsigned m);

private:
    void build_tables();

    unsigned m_;
    std::uint32_t poly_;
    std::vector<std::uint32_t> log_; // empty above m = 12
    std::vector<Element> exp_;       // doubled so log sums need no reduction
};

/// True iff the GF(2) polynomial with bitmask p is irreducible.
bool is_irreducible_gf2(std::uint32_t p);

/// Polynomial over GF(2^m), lowest degree first, no trailing zero
/// coefficients; the zero polynomial has no coefficients.
struct FieldPoly {
    std::vector<Element> coeffs;

    FieldPoly() = default;
    explicit FieldPoly(std::vector<Element> c) : coeffs(std::move(c)) { trim(); }

    static FieldPoly constant(Element c) { return FieldPoly(std::vector<Element>{c}); }
    static FieldPoly x() { return FieldPoly(std::vector<Element>{0, 1}); }

    int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
    bool is_zero() const noexcept { return coeffs.empty(); }
    Element lead() const noexcept { return coeffs.empty() ? 0 : coeffs.back(); }
    Element operator[](std::size_t i) const noexcept { return i < coeffs.size() ? coeffs[i] : 0; }

    void trim() {
        while (!coeffs.empty() && coeffs.back() == 0) coeffs.pop_back();
    }
    bool operator==(const FieldPoly&) const = default;
};

namespace poly {

FieldPoly add(const FieldPoly& a, const FieldPoly& b);
FieldPoly mul(const FieldContext& f, const FieldPoly& a, const FieldPoly& b);
FieldPoly scale(const FieldContext& f, const FieldPoly& a, Element c);
FieldPoly monic(const FieldContext& f, const FieldPoly& a);

struct DivMod {
    FieldPoly quotient;
    FieldPoly remainder;
};
DivMod divmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& b); // DomainError if b == 0
FieldPoly mod(const FieldContext& f, const FieldPoly& a, const FieldPoly& m);
FieldPoly mulmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& b, const FieldPoly& m);
FieldPoly sqrmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& m);

/// Monic gcd; gcd(0, 0) is the zero polynomial.
FieldPoly gcd(const FieldContext& f, FieldPoly a, FieldPoly b);
/// Inverse of a modulo m; DomainError if they are not coprime.
FieldPoly invmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& m);

Element eval(const FieldContext& f, const FieldPoly& p, Element a);

/// Rabin's test: x^(q^n) = x mod P and gcd(x^(q^(n/r)) - x, P) = 1 for
/// every prime r | n, where q = 2^m and n = deg P >= 1.
bool is_irreducible(const FieldContext& f, const FieldPoly& p);

struct IrreducibleSample {
    FieldPoly poly;
    unsigned trials = 0;
};
/// Rejection sampling over random monic degree-t polynomials, at most 100 t draws.
IrreducibleSample sample_irreducible_counted(const FieldContext& f, unsigned t, Rng& rng);
FieldPoly sample_irreducible(const FieldContext& f, unsigned t, Rng& rng);

/// R with R^2 = P mod g, for irreducible g.
FieldPoly sqrt_mod(const FieldContext& f, const FieldPoly& p, const FieldPoly& g);

} // namespace poly
} // namespace mcforge
