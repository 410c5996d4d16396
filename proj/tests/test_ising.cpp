#include <doctest.h>

#include <algorithm>

#include "mcforge/errors.hpp"
#include "mcforge/ising.hpp"

using namespace mcforge;

namespace {

// Hamming distance |q' - x G'| computed directly from the instance.
std::size_t distance_oracle(const McElieceInstance& inst, const BitVector& x) {
    return (vecmat(x, inst.G_prime) ^ inst.q_prime).weight();
}

std::uint64_t config_of(const BitVector& x) {
    std::uint64_t c = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (x.get(i)) c |= std::uint64_t{1} << i;
    return c;
}

// Plain brute force over every variable, auxiliaries included.
std::int64_t brute_min_over_aux(const PLocalInstance& pl, const BitVector& fixed) {
    const std::size_t naux = pl.num_vars - fixed.size();
    REQUIRE(naux <= 20);
    std::int64_t best = INT64_MAX;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << naux); ++a) {
        BitVector x(pl.num_vars);
        for (std::size_t i = 0; i < fixed.size(); ++i) x.set(i, fixed.get(i));
        for (std::size_t i = 0; i < naux; ++i) x.set(fixed.size() + i, (a >> i) & 1);
        best = std::min(best, energy(pl, x));
    }
    return best;
}

PLocalInstance single_term(std::int64_t c, std::vector<std::uint32_t> vars, std::size_t n) {
    PLocalInstance pl;
    pl.num_vars = n;
    pl.terms.push_back({c, std::move(vars)});
    pl.meta.original_vars = n;
    return pl;
}

} // namespace

TEST_SUITE("ising") {

TEST_CASE("mapped instance: one term per column, planted distance t") {
    auto g = generate_instance(36, 4, 6, "ising-map");
    auto pl = map_to_ising(g.instance);
    CHECK(pl.num_vars == g.instance.k);
    CHECK(pl.terms.size() + (pl.offset != 36 ? 1 : 0) >= 1);
    CHECK(pl.unit_coefficients());
    CHECK(unsat_count(pl, g.solution.q) == 4);
    CHECK(objective(pl, g.solution.q) == 2 * 4);
    Rng rng(1);
    for (int i = 0; i < 200; ++i) {
        auto x = BitVector::random(pl.num_vars, rng);
        const auto d = distance_oracle(g.instance, x);
        CHECK(unsat_count(pl, x) == d);
        CHECK(energy(pl, x) + pl.offset == 2 * static_cast<std::int64_t>(d));
    }
}

TEST_CASE("empty columns fold into the offset") {
    McElieceInstance inst;
    inst.n = 4;
    inst.k = 2;
    inst.t = 1;
    std::array<std::string_view, 2> rows{"1000", "1100"};
    inst.G_prime = BitMatrix::from_strings(rows);
    inst.q_prime = BitVector::from_string("0011");
    auto pl = map_to_ising(inst);
    CHECK(pl.terms.size() == 2);
    CHECK(pl.meta.constant_unsat == 2);
    for (std::uint64_t c = 0; c < 4; ++c) {
        auto x = config_bits(c, 2);
        CHECK(unsat_count(pl, x) == distance_oracle(inst, x));
        CHECK(objective(pl, x) == 2 * static_cast<std::int64_t>(distance_oracle(inst, x)));
    }
}

TEST_CASE("flipping q'_i flips only the sign of term i") {
    auto g = generate_instance(40, 3, 6, "flip");
    auto inst = g.instance;
    auto a = map_to_ising(inst);
    REQUIRE(a.terms.size() == inst.n);
    inst.q_prime.flip(5);
    auto b = map_to_ising(inst);
    for (std::size_t i = 0; i < inst.n; ++i) {
        CHECK(a.terms[i].vars == b.terms[i].vars);
        CHECK((a.terms[i].coeff == b.terms[i].coeff) == (i != 5));
    }
}

TEST_CASE("energy examples") {
    PLocalInstance pl;
    pl.num_vars = 3;
    pl.terms = {{-1, {0}}, {-1, {1, 2}}, {-1, {0, 1, 2}}};
    CHECK(energy(pl, BitVector(3)) == -3);
    CHECK(unsat_count(pl, BitVector(3)) == 0);
    CHECK(energy(pl, BitVector::from_string("100")) == 1);
    CHECK_THROWS_AS(energy(pl, BitVector(4)), UsageError);
}

TEST_CASE("exhaustive minimum is unique and planted at k = 16") {
    for (int s = 0; s < 3; ++s) {
        auto g = generate_instance(34, 3, 6, "unique-" + std::to_string(s));
        REQUIRE(g.instance.k == 16);
        auto pl = map_to_ising(g.instance);
        auto gs = exhaustive_ground_states(pl);
        REQUIRE(gs.configs.size() == 1);
        CHECK(gs.configs[0] == config_of(g.solution.q));
        CHECK(gs.min_energy + pl.offset == 2 * 3);
    }
}

TEST_CASE("3-local reduction of a single 4-local term (32-state oracle)") {
    for (std::int64_t c : {1, -1, 3, -2}) {
        auto pl = single_term(c, {0, 1, 2, 3}, 4);
        auto red = reduce_to_3local(pl);
        CHECK(red.num_vars == 5);
        CHECK(red.locality() == 3);
        for (std::uint64_t x = 0; x < 16; ++x) {
            auto fixed = config_bits(x, 4);
            std::int64_t best = INT64_MAX;
            for (int w = 0; w < 2; ++w) {
                auto full = config_bits(x | (std::uint64_t(w) << 4), 5);
                best = std::min(best, energy(red, full));
            }
            CHECK(best + red.offset == energy(pl, fixed) + pl.offset);
        }
    }
}

TEST_CASE("3-local reduction: already 3-local input unchanged, auxiliary count p - 3") {
    PLocalInstance three;
    three.num_vars = 4;
    three.terms = {{1, {0, 1, 2}}, {-1, {1, 3}}, {1, {0, 1, 2}}};
    CHECK(reduce_to_3local(three) == three);

    for (std::uint32_t p = 4; p <= 12; ++p) {
        std::vector<std::uint32_t> vars(p);
        for (std::uint32_t i = 0; i < p; ++i) vars[i] = i;
        auto red = reduce_to_3local(single_term(-1, vars, p));
        CHECK(red.num_vars == p + (p - 3));
        CHECK(red.locality() == 3);
        if (p <= 10) {
            for (std::uint64_t x = 0; x < (std::uint64_t{1} << p); x += 37) {
                auto fixed = config_bits(x, p);
                const auto want = energy(single_term(-1, vars, p), fixed);
                CHECK(brute_min_over_aux(red, fixed) + red.offset == want);
                CHECK(AuxiliaryMinimizer(red, p).minimum(fixed) + red.offset == want);
            }
        }
    }
}

TEST_CASE("2-local gadget reproduces the 3-body sign (16-state oracle)") {
    for (std::int64_t c : {1, -1, 2, -3}) {
        auto pl = single_term(c, {0, 1, 2}, 3);
        auto red = reduce_to_2local(pl);
        CHECK(red.num_vars == 4);
        CHECK(red.locality() == 2);
        for (auto& t : red.terms) CHECK(std::abs(t.coeff) <= 2 * std::abs(c));
        for (std::uint64_t x = 0; x < 8; ++x) {
            const auto e0 = energy(red, config_bits(x, 4));
            const auto e1 = energy(red, config_bits(x | 8, 4));
            CHECK(std::min(e0, e1) + red.offset == energy(pl, config_bits(x, 3)) + pl.offset);
        }
    }
    PLocalInstance two;
    two.num_vars = 2;
    two.terms = {{1, {0, 1}}, {-1, {0}}};
    CHECK(reduce_to_2local(two) == two);
    CHECK_THROWS_AS(reduce_to_2local(single_term(1, {0, 1, 2, 3}, 4)), UsageError);
}

TEST_CASE("auxiliary elimination agrees with brute force on reduced instances") {
    auto g = generate_instance(14, 1, 4, "aux-check");
    REQUIRE(g.instance.k == 10);
    auto pl = map_to_ising(g.instance);
    // keep the few lightest terms so the brute force stays small
    std::sort(pl.terms.begin(), pl.terms.end(), [](auto& a, auto& b) { return a.vars.size() < b.vars.size(); });
    pl.terms.resize(6);
    auto r3 = reduce_to_3local(pl);
    auto r2 = reduce_to_2local(r3);
    REQUIRE(r2.num_vars - 10 <= 20);
    AuxiliaryMinimizer am3(r3, 10), am2(r2, 10);
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        auto x = BitVector::random(10, rng);
        CHECK(am3.minimum(x) == brute_min_over_aux(r3, x));
        CHECK(am2.minimum(x) == brute_min_over_aux(r2, x));
        CHECK(am2.minimum(x) + r2.offset == objective(pl, x));
    }
}

TEST_CASE("reductions preserve the ground state at k = 10") {
    auto g = generate_instance(20, 2, 5, "reduce-gs");
    REQUIRE(g.instance.k == 10);
    auto pl = map_to_ising(g.instance);
    auto r3 = reduce_to_3local(pl);
    auto r2 = reduce_to_2local(r3);
    CHECK(r3.locality() <= 3);
    CHECK(r2.locality() <= 2);
    std::size_t splits_budget = 0;
    for (auto& t : pl.terms) splits_budget += t.vars.size() > 3 ? t.vars.size() - 3 : 0;
    CHECK(r3.num_vars == 10 + splits_budget);
    std::size_t three_terms = 0;
    for (auto& t : r3.terms) three_terms += t.vars.size() == 3;
    CHECK(r2.num_vars == r3.num_vars + three_terms);

    const auto planted = config_of(g.solution.q);
    for (const auto* red : {&r3, &r2}) {
        auto gs = exhaustive_ground_states(*red, 10);
        REQUIRE(gs.configs.size() == 1);
        CHECK(gs.configs[0] == planted);
        CHECK(gs.min_energy + red->offset == 2 * 2);
    }
}

TEST_CASE("scrambling") {
    auto g = generate_instance(20, 2, 5, "scramble");
    auto pl = map_to_ising(g.instance);
    const std::size_t k = pl.num_vars;
    CHECK(scramble_plocal(pl, BitMatrix::identity(k)) == pl);

    Rng rng(4);
    auto S = sample_invertible(k, rng);
    auto sc = scramble_plocal(pl, S);
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << k); ++c) {
        auto x = config_bits(c, k);
        REQUIRE(energy(sc, x) == energy(pl, vecmat(x, S)));
    }
    CHECK(scramble_plocal(sc, *inverse(S)) == pl);

    // singular S with corank 1 doubles the ground states
    BitMatrix T;
    do {
        T = sample_matrix(k, k, rng);
    } while (rank(T) != k - 1);
    auto gs0 = exhaustive_ground_states(pl);
    auto gs1 = exhaustive_ground_states(scramble_plocal(pl, T));
    REQUIRE(gs0.configs.size() == 1);
    // ground states of H(xT) are x with xT = q, if q is in the image of T
    if (solve_left(T, g.solution.q)) {
        CHECK(gs1.configs.size() == 2);
    } else {
        CHECK(gs1.min_energy > gs0.min_energy);
    }

    PLocalInstance nonunit = single_term(2, {0, 1}, 2);
    CHECK_THROWS_AS(scramble_plocal(nonunit, BitMatrix::identity(2)), UsageError);
}

TEST_CASE("canonicalize merges and cancels") {
    PLocalInstance pl;
    pl.num_vars = 3;
    pl.terms = {{1, {2, 0}}, {-1, {0, 2}}, {2, {1}}, {1, {1}}};
    auto c = canonicalize(pl);
    REQUIRE(c.terms.size() == 1);
    CHECK(c.terms[0] == Term{3, {1}});
}

TEST_CASE("plocal text round trip") {
    auto g = generate_instance(40, 3, 6, "text");
    for (const auto& pl : {map_to_ising(g.instance), reduce_to_2local(reduce_to_3local(map_to_ising(g.instance)))}) {
        const auto text = to_plocal_text(pl);
        auto back = plocal_from_text(text);
        CHECK(back == pl);
        CHECK(to_plocal_text(back) == text);
    }
    CHECK_THROWS_AS(plocal_from_text("plocal v2 1 0 0\n"), IoError);
    CHECK_THROWS_AS(plocal_from_text("plocal v1 2 1 0\n1 0 5\n"), IoError);
    CHECK_THROWS_AS(plocal_from_text("plocal v1 2 2 0\n1 0 1\n"), IoError);
    CHECK_THROWS_AS(plocal_from_text("plocal v1 3 1 0\n1 1 0\n"), IoError);
    auto ok = plocal_from_text("# a comment\nplocal v1 3 1 -2\n# another\n-1 0 2\n");
    CHECK(ok.offset == -2);
    CHECK(ok.terms[0] == Term{-1, {0, 2}});
}

}
