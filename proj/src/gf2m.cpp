#include "mcforge/gf2m.hpp"

#include <bit>
#include <utility>

#include "mcforge/errors.hpp"

namespace mcforge {

namespace {

int gf2_degree(std::uint64_t p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

std::uint64_t gf2_mod(std::uint64_t a, std::uint64_t p) {
    const int dp = gf2_degree(p);
    for (int da = gf2_degree(a); da >= dp; da = gf2_degree(a)) a ^= p << (da - dp);
    return a;
}

std::uint64_t gf2_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t r = 0;
    a = gf2_mod(a, p);
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a = gf2_mod(a << 1, p);
    }
    return r;
}

std::uint64_t gf2_gcd(std::uint64_t a, std::uint64_t b) {
    while (b) {
        a = gf2_mod(a, b);
        std::swap(a, b);
    }
    return a;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d) {
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0) n /= d;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

} // namespace

bool is_irreducible_gf2(std::uint32_t p) {
    const int n = gf2_degree(p);
    if (n < 1) return false;
    // x^(2^i) mod p for i up to n/2; any common factor with x^(2^i) - x is a
    // factor of degree dividing i.
    std::uint64_t h = 2;
    for (int i = 1; i <= n / 2; ++i) {
        h = gf2_mulmod(h, h, p);
        if (gf2_gcd(h ^ 2, p) != 1) return false;
    }
    return true;
}

std::uint32_t FieldContext::default_reduction_poly(unsigned m) {
    if (m < 1 || m > 16) throw UsageError("field degree m must be in [1, 16]");
    for (std::uint32_t p = std::uint32_t{1} << m; p < (std::uint32_t{2} << m); ++p)
        if (is_irreducible_gf2(p)) return p;
    throw InternalError("no irreducible polynomial found");
}

FieldContext::FieldContext(unsigned m) : FieldContext(m, default_reduction_poly(m)) {}

FieldContext::FieldContext(unsigned m, std::uint32_t reduction_poly) : m_(m), poly_(reduction_poly) {
    if (m < 1 || m > 16) throw UsageError("field degree m must be in [1, 16]");
    if (gf2_degree(reduction_poly) != static_cast<int>(m) || !is_irreducible_gf2(reduction_poly))
        throw UsageError("reduction polynomial is not irreducible of degree m");
    if (m <= 12) build_tables();
}

Element FieldContext::clmul_reduce(Element a, Element b) const noexcept {
    std::uint32_t r = 0;
    const std::uint32_t top = std::uint32_t{1} << m_;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top) a ^= poly_;
    }
    return r;
}

void FieldContext::build_tables() {
    const std::uint32_t order = size() - 1;
    auto slow_pow = [&](Element a, std::uint64_t e) {
        Element r = 1;
        while (e) {
            if (e & 1) r = clmul_reduce(r, a);
            a = clmul_reduce(a, a);
            e >>= 1;
        }
        return r;
    };
    const auto primes = prime_factors(order);
    Element gen = 1;
    for (Element a = (order == 1 ? 1 : 2); a <= order; ++a) {
        bool ok = true;
        for (auto p : primes)
            if (slow_pow(a, order / p) == 1) ok = false;
        if (ok) {
            gen = a;
            break;
        }
    }
    log_.assign(size(), 0);
    exp_.assign(2 * static_cast<std::size_t>(order), 0);
    Element x = 1;
    for (std::uint32_t i = 0; i < order; ++i) {
        exp_[i] = x;
        exp_[i + order] = x;
        log_[x] = i;
        x = clmul_reduce(x, gen);
    }
}

Element FieldContext::inv(Element a) const {
    if (a == 0) throw DomainError("inverse of zero field element");
    if (!log_.empty()) {
        const std::uint32_t order = size() - 1;
        return exp_[(order - log_[a]) % order];
    }
    return pow(a, size() - 2);
}

Element FieldContext::pow(Element a, std::uint64_t e) const noexcept {
    Element r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Element FieldContext::sqrt(Element a) const noexcept {
    for (unsigned i = 1; i < m_; ++i) a = sqr(a);
    return a;
}

namespace poly {

FieldPoly add(const FieldPoly& a, const FieldPoly& b) {
    std::vector<Element> c(std::max(a.coeffs.size(), b.coeffs.size()), 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[i] ^= a.coeffs[i];
    for (std::size_t i = 0; i < b.coeffs.size(); ++i) c[i] ^= b.coeffs[i];
    return FieldPoly(std::move(c));
}

FieldPoly mul(const FieldContext& f, const FieldPoly& a, const FieldPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Element> c(a.coeffs.size() + b.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) {
        if (a.coeffs[i] == 0) continue;
        for (std::size_t j = 0; j < b.coeffs.size(); ++j) c[i + j] ^= f.mul(a.coeffs[i], b.coeffs[j]);
    }
    return FieldPoly(std::move(c));
}

FieldPoly scale(const FieldContext& f, const FieldPoly& a, Element c) {
    std::vector<Element> out(a.coeffs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f.mul(a.coeffs[i], c);
    return FieldPoly(std::move(out));
}

FieldPoly monic(const FieldContext& f, const FieldPoly& a) {
    if (a.is_zero() || a.lead() == 1) return a;
    return scale(f, a, f.inv(a.lead()));
}

DivMod divmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& b) {
    if (b.is_zero()) throw DomainError("polynomial division by zero");
    if (a.degree() < b.degree()) return {{}, a};
    std::vector<Element> r = a.coeffs;
    std::vector<Element> q(a.coeffs.size() - b.coeffs.size() + 1, 0);
    const Element inv_lead = f.inv(b.lead());
    const auto db = static_cast<std::size_t>(b.degree());
    for (std::size_t i = r.size(); i-- > db;) {
        if (r[i] == 0) continue;
        const Element c = f.mul(r[i], inv_lead);
        q[i - db] = c;
        for (std::size_t j = 0; j <= db; ++j) r[i - db + j] ^= f.mul(c, b.coeffs[j]);
    }
    return {FieldPoly(std::move(q)), FieldPoly(std::move(r))};
}

FieldPoly mod(const FieldContext& f, const FieldPoly& a, const FieldPoly& m) { return divmod(f, a, m).remainder; }

FieldPoly mulmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& b, const FieldPoly& m) {
    return mod(f, mul(f, a, b), m);
}

FieldPoly sqrmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& m) {
    if (a.is_zero()) return {};
    std::vector<Element> c(2 * a.coeffs.size() - 1, 0);
    for (std::size_t i = 0; i < a.coeffs.size(); ++i) c[2 * i] = f.sqr(a.coeffs[i]);
    return mod(f, FieldPoly(std::move(c)), m);
}

FieldPoly gcd(const FieldContext& f, FieldPoly a, FieldPoly b) {
    while (!b.is_zero()) {
        auto r = mod(f, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(f, a);
}

FieldPoly invmod(const FieldContext& f, const FieldPoly& a, const FieldPoly& m) {
    // Extended Euclid tracking only the coefficient of a.
    FieldPoly r0 = m, r1 = mod(f, a, m);
    FieldPoly s0, s1 = FieldPoly::constant(1);
    while (!r1.is_zero()) {
        auto [q, r] = divmod(f, r0, r1);
        auto s = add(s0, mul(f, q, s1));
        r0 = std::move(r1);
        r1 = std::move(r);
        s0 = std::move(s1);
        s1 = std::move(s);
    }
    if (r0.degree() != 0) throw DomainError("polynomial is not invertible modulo m");
    return scale(f, s0, f.inv(r0.lead()));
}

Element eval(const FieldContext& f, const FieldPoly& p, Element a) {
    Element r = 0;
    for (std::size_t i = p.coeffs.size(); i-- > 0;) r = f.mul(r, a) ^ p.coeffs[i];
    return r;
}

bool is_irreducible(const FieldContext& f, const FieldPoly& p_in) {
    if (p_in.degree() < 1) throw UsageError("is_irreducible: degree must be at least 1");
    const FieldPoly p = monic(f, p_in);
    const auto n = static_cast<unsigned>(p.degree());
    if (n == 1) return true;
    // powers[i] = x^(q^i) mod p
    std::vector<FieldPoly> powers(n + 1);
    powers[0] = mod(f, FieldPoly::x(), p);
    for (unsigned i = 1; i <= n; ++i) {
        FieldPoly h = powers[i - 1];
        for (unsigned s = 0; s < f.m(); ++s) h = sqrmod(f, h, p);
        powers[i] = std::move(h);
    }
    if (!add(powers[n], powers[0]).is_zero()) return false;
    for (auto r : prime_factors(n)) {
        const auto diff = add(powers[n / r], powers[0]);
        if (gcd(f, p, diff).degree() != 0) return false;
    }
    return true;
}

IrreducibleSample sample_irreducible_counted(const FieldContext& f, unsigned t, Rng& rng) {
    if (t < 1) throw UsageError("sample_irreducible: degree must be at least 1");
    const unsigned cap = 100 * t;
    for (unsigned trial = 1; trial <= cap; ++trial) {
        std::vector<Element> c(t + 1);
        for (unsigned i = 0; i < t; ++i) c[i] = static_cast<Element>(rng.below(f.size()));
        c[t] = 1;
        FieldPoly p(std::move(c));
        if (is_irreducible(f, p)) return {std::move(p), trial};
    }
    throw InternalError("sample_irreducible: trial cap exceeded");
}

FieldPoly sample_irreducible(const FieldContext& f, unsigned t, Rng& rng) {
    return sample_irreducible_counted(f, t, rng).poly;
}

FieldPoly sqrt_mod(const FieldContext& f, const FieldPoly& p_in, const FieldPoly& g) {
    const FieldPoly p = mod(f, p_in, g);
    // sqrt(x) = x^(2^(m deg g - 1)) mod g
    FieldPoly sx = mod(f, FieldPoly::x(), g);
    const auto squarings = f.m() * static_cast<unsigned>(g.degree()) - 1;
    for (unsigned i = 0; i < squarings; ++i) sx = sqrmod(f, sx, g);

    std::vector<Element> even((p.coeffs.size() + 1) / 2, 0), odd(p.coeffs.size() / 2, 0);
    for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
        const Element r = f.sqrt(p.coeffs[i]);
        if (i % 2 == 0)
            even[i / 2] = r;
        else
            odd[i / 2] = r;
    }
    return mod(f, add(FieldPoly(std::move(even)), mul(f, sx, FieldPoly(std::move(odd)))), g);
}

} // namespace poly
} // namespace mcforge
