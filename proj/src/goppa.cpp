#include "mcforge/goppa.hpp"

#include <numeric>
#include <unordered_set>

#include "mcforge/errors.hpp"

namespace mcforge {

BitVector GoppaCode::message_of(const BitVector& codeword) const {
    BitVector m(k);
    for (std::size_t i = 0; i < k; ++i)
        if (codeword.get(info_cols[i])) m.set(i);
    return m;
}

GoppaCode build_code(std::shared_ptr<const FieldContext> field, FieldPoly g, std::vector<Element> support) {
    const FieldContext& f = *field;
    const std::size_t n = support.size();
    if (g.degree() < 1) throw UsageError("Goppa polynomial must have degree >= 1");
    if (n > f.size()) throw UsageError("support larger than the field (N > 2^m)");
    {
        std::unordered_set<Element> seen;
        for (auto a : support) {
            if (a >= f.size()) throw UsageError("support element outside the field");
            if (!seen.insert(a).second) throw UsageError("duplicate support element");
        }
    }
    const auto t = static_cast<unsigned>(g.degree());
    const unsigned m = f.m();

    GoppaCode code;
    code.n = n;
    code.t = t;
    code.inv_linear.reserve(n);

    BitMatrix expanded(static_cast<std::size_t>(t) * m, n);
    for (std::size_t j = 0; j < n; ++j) {
        const Element ga = poly::eval(f, g, support[j]);
        if (ga == 0) throw UsageError("support element is a root of the Goppa polynomial");
        const Element ginv = f.inv(ga);
        Element pw = ginv; // alpha^i / g(alpha)
        for (unsigned i = 0; i < t; ++i) {
            for (unsigned b = 0; b < m; ++b)
                if ((pw >> b) & 1U) expanded.set(static_cast<std::size_t>(i) * m + b, j);
            pw = f.mul(pw, support[j]);
        }
        code.inv_linear.push_back(poly::invmod(f, FieldPoly(std::vector<Element>{support[j], 1}), g));
    }

    auto ech = row_echelon(std::move(expanded));
    code.k = n - ech.pivots.size();
    if (code.k == 0) throw UsageError("Goppa code has dimension 0");
    code.H = std::move(ech.reduced);
    auto rk = rank_and_kernel(code.H);
    code.G = BitMatrix::from_rows(rk.kernel);
    code.info_cols = std::move(ech.free_cols);
    code.field = std::move(field);
    code.g = std::move(g);
    code.support = std::move(support);
    return code;
}

CodeSample sample_code_counted(std::shared_ptr<const FieldContext> field, std::size_t n, unsigned t, Rng& rng) {
    const FieldContext& f = *field;
    if (n > f.size()) throw UsageError("N must not exceed 2^m");
    if (t < 1) throw UsageError("t must be at least 1");
    if (n <= static_cast<std::size_t>(t) * f.m()) throw UsageError("N - t m must be at least 1");
    const std::size_t target_k = n - static_cast<std::size_t>(t) * f.m();

    Rng poly_rng = rng.split("polynomial");
    Rng support_rng = rng.split("support");
    std::vector<Element> all(f.size());
    for (unsigned attempt = 1; attempt <= 100; ++attempt) {
        FieldPoly g = poly::sample_irreducible(f, t, poly_rng);

        std::iota(all.begin(), all.end(), Element{0});
        for (std::size_t i = 0; i < n; ++i) {
            const auto j = i + static_cast<std::size_t>(support_rng.below(all.size() - i));
            std::swap(all[i], all[j]);
        }
        std::vector<Element> support(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));

        bool root_in_support = false;
        for (auto a : support)
            if (poly::eval(f, g, a) == 0) root_in_support = true;
        if (root_in_support) continue;

        auto code = build_code(field, std::move(g), std::move(support));
        if (code.k == target_k) return {std::move(code), attempt};
    }
    throw InternalError("sample_code: 100 consecutive rejections");
}

GoppaCode sample_code(std::size_t n, unsigned t, unsigned m, Rng& rng) {
    return sample_code_counted(std::make_shared<const FieldContext>(m), n, t, rng).code;
}

BitVector decode(const BitVector& y, const GoppaCode& code) {
    if (y.size() != code.n) throw UsageError("decode: word length does not match the code");
    const FieldContext& f = *code.field;
    const FieldPoly& g = code.g;
    BitVector err(code.n);

    FieldPoly s;
    for (auto j : y.support()) s = poly::add(s, code.inv_linear[j]);
    if (s.is_zero()) return err;

    // sigma = a^2 + x b^2 with a = b sqrt(1/s + x) mod g
    const FieldPoly T = poly::invmod(f, s, g);
    const FieldPoly tau = poly::sqrt_mod(f, poly::add(T, FieldPoly::x()), g);

    const int half = static_cast<int>(code.t) / 2;
    FieldPoly r_prev = g, r = tau;
    FieldPoly b_prev, b = FieldPoly::constant(1);
    while (!r.is_zero() && r.degree() > half) {
        auto [q, rem] = poly::divmod(f, r_prev, r);
        auto b_next = poly::add(b_prev, poly::mul(f, q, b));
        r_prev = std::move(r);
        r = std::move(rem);
        b_prev = std::move(b);
        b = std::move(b_next);
    }
    const FieldPoly a2 = poly::mul(f, r, r);
    const FieldPoly xb2 = poly::mul(f, FieldPoly::x(), poly::mul(f, b, b));
    const FieldPoly sigma = poly::add(a2, xb2);
    if (sigma.degree() < 1 || sigma.degree() > static_cast<int>(code.t))
        throw DecodeFailure("error locator degree outside [1, t]");

    std::size_t roots = 0;
    for (std::size_t j = 0; j < code.n; ++j) {
        if (poly::eval(f, sigma, code.support[j]) == 0) {
            err.set(j);
            ++roots;
        }
    }
    if (roots != static_cast<std::size_t>(sigma.degree())) throw DecodeFailure("error locator does not split over the support");
    if (!code.syndrome(y ^ err).is_zero()) throw DecodeFailure("corrected word is not a codeword");
    return err;
}

} // namespace mcforge
